use pi1scan_core::complex::{edges_span_connected, Complex, EdgeMask, Reduced, TriangleComplex};
use pi1scan_core::recognize::{GroupId, Recognizer};
use pi1scan_core::search::{build_pure, extend_all, group_of, verify_witness, Mode, SearchConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected spanning edge set of `l` containing its free edges.
fn random_cone_set(l: &TriangleComplex, rng: &mut impl Rng) -> Option<EdgeMask> {
    let free = l.free_edges();
    let rest: Vec<usize> = (0..120).filter(|&e| (l.edges() & !free) >> e & 1 == 1).collect();
    let p = rng.gen_range(0.2..0.9);
    let a = rest.iter().filter(|_| rng.gen_bool(p)).fold(free, |m, &e| m | 1 << e);
    edges_span_connected(a, l.vertex_set()).then_some(a)
}

fn cone_group(l: &TriangleComplex, a: EdgeMask, rec: &mut Recognizer) -> GroupId {
    group_of(&l.cone_extend(a).unwrap(), rec).unwrap()
}

/// Every descendant of a pruned edge set has a group the pruning rule would also stop at,
/// checked by direct computation on the extended complex.
#[test]
fn pruning_is_sound_on_sampled_branches() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut rec = Recognizer::default();
    for mode in [Mode::Nontrivial, Mode::Noncyclic] {
        let pure = build_pure(6, mode).unwrap();
        let mut samples = 0;
        let mut attempts = 0;
        while samples < 5_000 {
            attempts += 1;
            assert!(attempts < 1_000_000, "too few pruned branches in {mode} mode");
            let l = pure.complexes.choose(&mut rng).unwrap();
            let Some(a) = random_cone_set(l, &mut rng) else { continue };
            if !mode.prunes(&cone_group(l, a, &mut rec)) {
                continue;
            }
            let missing: Vec<usize> = (0..120).filter(|&e| (l.edges() & !a) >> e & 1 == 1).collect();
            let extra = missing.iter().filter(|_| rng.gen_bool(0.5)).fold(0, |m: EdgeMask, &e| m | 1 << e);
            let g = cone_group(l, a | extra, &mut rec);
            assert!(mode.prunes(&g), "{l:?} with {a:#x} + {extra:#x} gives {g}");
            samples += 1;
        }
    }
}

#[test]
fn witnesses_reverify() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut rec = Recognizer::default();
    let pure = build_pure(6, Mode::Nontrivial).unwrap();
    for (i, l) in pure.complexes.choose_multiple(&mut rng, 40).enumerate() {
        let r = extend_all(l, i, Mode::Nontrivial, SearchConfig::default(), &mut rec).unwrap();
        for w in r.groups.values() {
            assert!(verify_witness(&w.complex(), &w.group).unwrap(), "{w:?}");
            assert_eq!(w.complex().n(), 7);
        }
    }
}

fn random_complex(n: usize, rng: &mut impl Rng) -> Complex {
    let mut simplices: Vec<u16> = Vec::new();
    for _ in 0..rng.gen_range(3..14) {
        let size = rng.gen_range(2..=4);
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(rng);
        simplices.push(vs[..size].iter().fold(0, |m, &v| m | 1 << v));
    }
    let maximal: Vec<Vec<usize>> = simplices
        .iter()
        .filter(|&&s| !simplices.iter().any(|&t| t != s && t & s == s))
        .map(|&s| (0..n).filter(|v| s >> v & 1 == 1).collect())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    Complex::new(n, maximal).unwrap()
}

#[test]
fn reduction_changes_group_by_free_factor_only() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut rec = Recognizer::default();
    let mut checked = 0;
    while checked < 400 {
        let n = rng.gen_range(4..=7);
        let k = random_complex(n, &mut rng);
        if !k.is_connected() || k.vertex_count() != n {
            continue;
        }
        let g = rec.identify_complex(&k).unwrap();
        let rep = k.reduce_to_2pure().unwrap();
        match rep.reduced {
            Reduced::GraphLike => assert!(g.is_free(), "{k:?} reduces to a graph but has group {g}"),
            Reduced::TwoPure(t) => {
                let h = group_of(&t, &mut rec).unwrap().with_extra_free_rank(rep.free_rank_delta);
                assert_eq!(g, h, "{k:?}");
            }
        }
        assert!(k.homology_h1().rank >= rep.free_rank_delta);
        checked += 1;
    }
}
