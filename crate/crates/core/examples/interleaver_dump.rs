//! Generate an interleaver, write it to a file and read it back.
//!
//! ```text
//! cargo run --example interleaver_dump -- [length] [seed] [path]
//! ```

use irturbo::interleave::Permutation;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(16), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(1), |s| s.parse())?;
    let path = args.next().unwrap_or_else(|| "interleaver.txt".into());

    let perm = Permutation::generate(seed, n)?;
    std::fs::write(&path, perm.dump())?;
    let back = Permutation::read_dump(std::io::BufReader::new(std::fs::File::open(&path)?))?;
    assert_eq!(back, perm);

    let x: Vec<usize> = (0..n).collect();
    println!("wrote {path}");
    println!("position i goes to {:?}", &perm.forward()[..n.min(16)]);
    println!("interleaved        {:?}", &perm.apply(&x)?[..n.min(16)]);
    Ok(())
}
