use irturbo::profile::{code_rate, depuncture, puncture, DegreeProfile, PuncturePattern};
use proptest::prelude::*;

/// Random valid profile: distinct degrees in 2..=10 with random positive weights.
fn profile_strategy() -> impl Strategy<Value = DegreeProfile> {
    prop::collection::btree_map(2usize..=10, 1u32..=1000, 1..=4).prop_map(|m| {
        let total: u32 = m.values().sum();
        let mut pairs: Vec<(usize, f64)> = m.iter().map(|(&d, &w)| (d, w as f64 / total as f64)).collect();
        // absorb rounding so the fractions sum to 1 exactly enough
        let head: f64 = pairs[1..].iter().map(|p| p.1).sum();
        pairs[0].1 = 1.0 - head;
        DegreeProfile::from_pairs(&pairs).unwrap()
    })
}

fn pattern_strategy() -> impl Strategy<Value = PuncturePattern> {
    prop::collection::vec(any::<bool>(), 1..16).prop_filter_map("needs a keep", |mut mask| {
        if !mask.iter().any(|&k| k) {
            mask[0] = true;
        }
        PuncturePattern::new(mask).ok()
    })
}

proptest! {
    #[test]
    fn realized_counts_track_fractions(profile in profile_strategy(), k in 4usize..3000) {
        prop_assume!(k >= profile.entries().len());
        let groups = profile.group_counts(k).unwrap();
        prop_assert_eq!(groups.iter().map(|g| g.1).sum::<usize>(), k);
        for &(degree, count) in &groups {
            let f = profile.entries().iter().find(|e| e.degree == degree).unwrap().fraction;
            prop_assert!((count as f64 - f * k as f64).abs() < 1.0);
        }
        let map = profile.realize(k).unwrap();
        let m_rep: usize = groups.iter().map(|&(d, n)| d * n).sum();
        prop_assert_eq!(map.repeated_length(), m_rep);
        let mut seen = vec![0usize; k];
        for slot in map.layout() {
            seen[slot.source] += 1;
        }
        prop_assert_eq!(&seen[..], map.degree_of());
    }

    #[test]
    fn nominal_rate_matches_bit_counting(profile in profile_strategy(), pattern in pattern_strategy(), k in 200usize..5000) {
        let map = profile.realize(k).unwrap();
        let kept = pattern.kept_count(map.repeated_length());
        let counted = k as f64 / (k + kept) as f64;
        let nominal = code_rate(&profile, &pattern);
        // rounding of n_i and the partial last mask period move the count by a
        // few parity bits at most
        let slack = (profile.max_degree() * profile.entries().len() + pattern.period()) as f64 / k as f64;
        prop_assert!((counted - nominal).abs() <= slack, "{counted} vs {nominal}");
    }

    #[test]
    fn puncture_depuncture_roundtrip(pattern in pattern_strategy(), xs in prop::collection::vec(-10.0f64..10.0, 0..200)) {
        let kept = puncture(&xs, &pattern);
        prop_assert_eq!(kept.len(), pattern.kept_count(xs.len()));
        let restored = depuncture(&kept, &pattern, xs.len()).unwrap();
        for (p, (r, x)) in restored.iter().zip(&xs).enumerate() {
            if pattern.is_kept(p) {
                prop_assert_eq!(r, x);
            } else {
                prop_assert_eq!(*r, 0.0);
            }
        }
        prop_assert_eq!(puncture(&restored, &pattern), kept);
    }

    #[test]
    fn average_degree_is_order_free(profile in profile_strategy()) {
        let mut entries = profile.entries().to_vec();
        entries.reverse();
        let reversed = DegreeProfile::new(entries).unwrap();
        prop_assert!((reversed.average_degree() - profile.average_degree()).abs() < 1e-12);
        prop_assert!(profile.average_degree() >= 2.0);
    }

    #[test]
    fn literals_roundtrip(profile in profile_strategy(), pattern in pattern_strategy()) {
        prop_assert_eq!(profile.to_string().parse::<DegreeProfile>().unwrap(), profile);
        prop_assert_eq!(pattern.to_string().parse::<PuncturePattern>().unwrap(), pattern);
    }
}

#[test]
fn table_mask_deletes_positions_four_seven_eleven() {
    let mask: PuncturePattern = "11101101110".parse().unwrap();
    let deleted: Vec<usize> = (1..=11).filter(|&p| !mask.is_kept(p - 1)).collect();
    assert_eq!(deleted, vec![4, 7, 11]);
}

#[test]
fn prose_and_table_masks_both_parse() {
    let prose: PuncturePattern = "101101110".parse().unwrap();
    assert!((prose.deleted_fraction() - 3.0 / 9.0).abs() < 1e-15);
    for m in ["10110", "11110", "10"] {
        assert!(m.parse::<PuncturePattern>().is_ok());
    }
}

#[test]
fn qpsk_row_rate_is_reported_as_computed() {
    // Usually labelled 0.40; the profile and mask give about 0.389.
    let r = code_rate(&"2:0.96,6:0.04".parse().unwrap(), &"11101101110".parse().unwrap());
    assert!((r - 1.0 / (1.0 + 2.16 * 8.0 / 11.0)).abs() < 1e-12);
    assert!((r - 0.389).abs() < 1e-3);
}
