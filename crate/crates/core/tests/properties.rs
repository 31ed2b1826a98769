//! Randomized invariants not already covered by the acceptance suite.

use std::collections::BTreeMap;

use namecat::eval::{cross_validate_with_folds, train_profile};
use namecat::normalize::normalize_with;
use namecat::{
    build_profile, derive_last_names, extract_ngrams, fold_merge_degraded, fold_merge_recount,
    fragment, fscore, ingest, make_folds, normalize, out_of_place, EvalConfig, FoldTable,
    GroupingRules, LabeledName, NgramRange, NormalizationConfig, Variant,
};
use proptest::prelude::*;

fn cfg() -> ProptestConfig {
    ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn one_to_one() -> FoldTable {
    FoldTable::parse("å\ta\nä\ta\né\te\nö\to\nč\tc\nš\ts\nł\tl\n", "t").unwrap()
}

fn dataset(max: usize) -> impl Strategy<Value = Vec<LabeledName>> {
    proptest::collection::vec(("[a-zé]{1,6}( [a-z]{1,5})?", 0usize..3), 0..max).prop_map(|v| {
        v.into_iter()
            .map(|(n, l)| LabeledName::new(n, ["x", "y", "z"][l], Variant::Full))
            .collect()
    })
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn folding_commutes_with_lowercase(text in "[a-zA-ZåÅäÄéÉøØßčČłŁ ]{0,30}") {
        let folded = NormalizationConfig::folded();
        prop_assert_eq!(normalize(&text, &folded), normalize(&text.to_lowercase(), &folded));
        prop_assert_eq!(normalize(&text, &folded), normalize(&text.to_uppercase(), &folded));
    }

    #[test]
    fn unigrams_and_bigrams_per_token(token in "[a-z]{1,12}") {
        let range = NgramRange::new(1, 2).unwrap();
        let counts = extract_ngrams(&token, range);
        let bigrams: u64 = counts.iter().filter(|(g, _)| g.chars().count() == 2).map(|(_, c)| c).sum();
        let unigrams: u64 = counts.iter().filter(|(g, _)| g.chars().count() == 1).map(|(_, c)| c).sum();
        prop_assert_eq!(bigrams, token.len() as u64 + 1);
        prop_assert_eq!(unigrams, token.len() as u64);
    }

    #[test]
    fn recount_matches_prefolded_text(text in "[a-zåäéöčšł ]{0,40}", max_len in 1usize..60) {
        let table = one_to_one();
        let range = NgramRange::default();
        let raw = extract_ngrams(&normalize_with(&text, &NormalizationConfig::preserving(), &table), range);
        let recount = fold_merge_recount(&raw, &table, "t", max_len).unwrap();
        let pre = extract_ngrams(&normalize_with(&text, &NormalizationConfig::folded(), &table), range);
        let direct = build_profile(&pre, "t", max_len).unwrap();
        prop_assert_eq!(recount.entries(), direct.entries());
    }

    #[test]
    fn degraded_merge_never_grows(text in "[a-zåäéöčšł ]{0,40}", max_len in 1usize..60) {
        let table = one_to_one();
        let raw = extract_ngrams(&normalize_with(&text, &NormalizationConfig::preserving(), &table), NgramRange::default());
        let profile = build_profile(&raw, "t", max_len).unwrap();
        let degraded = fold_merge_degraded(&profile, &table);
        prop_assert!(degraded.len() <= profile.len());
        prop_assert!(degraded.folded());
        let kept: u64 = degraded.entries().iter().map(|e| e.1).sum();
        prop_assert_eq!(kept, profile.entries().iter().map(|e| e.1).sum::<u64>());
    }

    #[test]
    fn scaling_counts_keeps_ranks(text in "[a-z ]{1,40}", factor in 1u64..20, max_len in 1usize..60) {
        let counts = extract_ngrams(&normalize(&text, &NormalizationConfig::default()), NgramRange::default());
        let a = build_profile(&counts, "t", max_len).unwrap();
        let b = build_profile(&counts.scaled(factor), "t", max_len).unwrap();
        prop_assert!(a.ngrams().eq(b.ngrams()));
        let q = build_profile(&extract_ngrams("ab", NgramRange::default()), "q", 400).unwrap();
        prop_assert_eq!(out_of_place(&q, &a), out_of_place(&q, &b));
    }

    #[test]
    fn last_names_never_outnumber_full_names(data in dataset(40)) {
        let last = derive_last_names(&data);
        prop_assert!(last.len() <= data.len());
        prop_assert!(last.iter().all(|n| n.variant == Variant::Last && !n.name.contains(' ')));
    }

    #[test]
    fn ingest_ignores_line_order(rows in proptest::collection::vec(("[A-Z][a-z]{1,6} [A-Z][a-z]{1,6}", 0usize..3), 1..30)) {
        let mut rules = GroupingRules::empty();
        rules.map("Poland", "polish").map("Italy", "italian").drop_nationality("Greece");
        let nat = ["Poland", "Italy", "Greece"];
        let lines: Vec<String> = rows.iter().map(|(n, k)| format!("{n}\t{}", nat[*k])).collect();
        let mut reversed = lines.clone();
        reversed.reverse();
        let a = ingest(lines.join("\n").as_bytes(), &rules);
        let b = ingest(reversed.join("\n").as_bytes(), &rules);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let sort = |mut v: Vec<LabeledName>| { v.sort_by(|x, y| (&x.language, &x.name).cmp(&(&y.language, &y.name))); v };
                prop_assert_eq!(a.stats, b.stats);
                prop_assert_eq!(sort(a.names), sort(b.names));
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "order changed success"),
        }
    }

    #[test]
    fn fragments_are_exact_prefix_cuts(text in "[a-z ]{0,60}", length in 1usize..12, stride in 1usize..12) {
        let pieces = fragment(&text, length, stride).unwrap();
        let chars: Vec<char> = text.chars().collect();
        let expected = if chars.len() < length { 0 } else { (chars.len() - length) / stride + 1 };
        prop_assert_eq!(pieces.len(), expected);
        for (i, p) in pieces.iter().enumerate() {
            prop_assert_eq!(p.chars().count(), length);
            prop_assert_eq!(p, &chars[i * stride..i * stride + length].iter().collect::<String>());
        }
    }

    #[test]
    fn fscore_is_a_harmonic_mean(p in 0.0f64..=1.0, r in 0.0f64..=1.0) {
        let f = fscore(p, r);
        prop_assert!(f <= (p + r) / 2.0 + 1e-12);
        prop_assert!(f >= p.min(r) - 1e-12);
        prop_assert_eq!(f == 0.0, p * r == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pooled_confusion_covers_every_example(data in dataset(60), seed in any::<u64>()) {
        let mut sizes: BTreeMap<&str, usize> = BTreeMap::new();
        for n in &data {
            *sizes.entry(&n.language).or_insert(0) += 1;
        }
        prop_assume!(!data.is_empty() && sizes.values().all(|&c| c >= 3));
        let config = EvalConfig { max_len: 50, ..EvalConfig::default() };
        let folds = make_folds(&data, 3, seed).unwrap();
        let report = cross_validate_with_folds(&data, &folds, &config).unwrap();
        prop_assert_eq!(report.total(), data.len() as u64);

        // reordering the dataset together with its fold assignment changes nothing
        let mut order: Vec<usize> = (0..data.len()).collect();
        order.reverse();
        let permuted: Vec<LabeledName> = order.iter().map(|&i| data[i].clone()).collect();
        let mut pfolds = folds.clone();
        pfolds.assignment = order.iter().map(|&i| folds.assignment[i]).collect();
        let again = cross_validate_with_folds(&permuted, &pfolds, &config).unwrap();
        prop_assert_eq!(report.accuracy(), again.accuracy());
        prop_assert_eq!(report.confusion, again.confusion);
    }

    #[test]
    fn training_is_order_free(names in proptest::collection::vec("[a-zé]{1,8}", 1..20)) {
        let config = EvalConfig::default();
        let a = train_profile(names.iter().map(String::as_str), "x", &config).unwrap();
        let b = train_profile(names.iter().rev().map(String::as_str), "x", &config).unwrap();
        prop_assert_eq!(a.to_text(), b.to_text());
    }
}
