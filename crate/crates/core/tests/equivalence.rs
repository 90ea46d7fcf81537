use biproj_apn::apn::{apn_naive, to_truth_table};
use biproj_apn::equivalence::el::{is_graph_equiv, is_graph_equiv_by_sets};
use biproj_apn::equivalence::restricted::{search_equivalence, RestrictedOutcome};
use biproj_apn::family::{enumerate_family, FamilyTag};
use biproj_apn::walsh::extended_walsh_spectrum;
use biproj_apn::FieldCtx;

// every witness the search returns must hold on the graph, in both checks,
// and its inverse must hold in the other direction; equivalent pairs share
// differential and Walsh spectra
#[test]
fn search_witnesses_are_sound() {
    let ctx = FieldCtx::new(5).unwrap();
    let mut pool = Vec::new();
    for tag in [FamilyTag::F1, FamilyTag::F2, FamilyTag::Taniguchi] {
        pool.extend(enumerate_family(&ctx, tag).unwrap().into_iter().take(6));
    }
    let mut found = 0;
    for f in &pool {
        for g in &pool {
            let RestrictedOutcome::Equivalent(w) = search_equivalence(&f.pair, &g.pair).unwrap() else { continue };
            found += 1;
            assert!(is_graph_equiv(&f.pair, &g.pair, &w.gamma).unwrap(), "{} -> {}", f.params, g.params);
            assert!(is_graph_equiv_by_sets(&f.pair, &g.pair, &w.gamma).unwrap());
            let inv = w.gamma.inverse(&ctx).unwrap();
            assert!(is_graph_equiv(&g.pair, &f.pair, &inv).unwrap());

            let (tf, tg) = (to_truth_table(&f.pair).unwrap(), to_truth_table(&g.pair).unwrap());
            assert_eq!(apn_naive(&tf).1, apn_naive(&tg).1);
            assert_eq!(extended_walsh_spectrum(&tf).unwrap(), extended_walsh_spectrum(&tg).unwrap());
        }
    }
    assert!(found >= pool.len());
}

#[test]
fn different_pairs_fail_identity() {
    let ctx = FieldCtx::new(4).unwrap();
    let insts = enumerate_family(&ctx, FamilyTag::Carlet).unwrap();
    let id = biproj_apn::equivalence::el::ELMap::identity();
    assert!(is_graph_equiv(&insts[0].pair, &insts[0].pair, &id).unwrap());
    assert!(!is_graph_equiv(&insts[0].pair, &insts[1].pair, &id).unwrap());
    assert!(!is_graph_equiv_by_sets(&insts[0].pair, &insts[1].pair, &id).unwrap());
}
