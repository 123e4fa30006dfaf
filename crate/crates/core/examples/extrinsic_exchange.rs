//! How extrinsic values flow between the copies of one information bit.
//!
//! ```text
//! cargo run --example extrinsic_exchange
//! ```

use irturbo::codec::{combine_group, extrinsic_combine};
use irturbo::profile::DegreeProfile;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // degree 2 is a plain swap
    println!("{:?} -> {:?}", [1.5, -0.5], combine_group(&[1.5, -0.5])?);
    // higher degrees: each copy receives the sum of the others
    let e = [0.8, -0.2, 1.1, 0.4];
    let a = combine_group(&e)?;
    println!("{e:?} -> {a:.2?}");
    let total: f64 = e.iter().sum();
    println!("sum in {total:.2}, sum out {:.2} (= (d-1) x sum in)", a.iter().sum::<f64>());

    let profile: DegreeProfile = "2:0.75,4:0.25".parse()?;
    let map = profile.realize(4)?;
    let ext: Vec<f64> = (0..map.repeated_length()).map(|i| 0.1 * (i as f64 + 1.0)).collect();
    let apriori = extrinsic_combine(&ext, &map)?;
    for (j, copies) in (0..map.source_count()).map(|j| (j, map.copies(j))) {
        println!(
            "bit {j} (degree {}): extrinsic {:.1?} -> a priori {:.1?}",
            copies.len(),
            &ext[copies.clone()],
            &apriori[copies]
        );
    }
    Ok(())
}
