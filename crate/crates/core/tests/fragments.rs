mod common;

use autstruct::checker::{decide_classic, ClassicOptions};
use autstruct::fragments::{decide_sigma1, decide_sigma2, FragmentOptions};
use autstruct::reductions::builtin;
use common::{random_finite_presentation, random_prenex, FiniteModel, BUILTIN_SIGNATURES};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn sigma1_agrees_with_classic_on_builtins() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (name, sig) in BUILTIN_SIGNATURES {
        let p = builtin(name).unwrap();
        for _ in 0..30 {
            let e = rng.gen_range(1..=3);
            let f = random_prenex(&mut rng, sig, e, 0);
            let (want, _) = decide_classic(&p, &f, ClassicOptions::default()).unwrap();
            let (got, st) = decide_sigma1(&p, &f, FragmentOptions::default()).unwrap();
            assert_eq!(got, want, "{name}: {f}");
            assert!(!st.fallback);
        }
    }
}

#[test]
fn sigma2_agrees_with_classic_on_builtins() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let (mut subsets, mut classic_states) = (0, 0);
    for (name, sig) in BUILTIN_SIGNATURES {
        let p = builtin(name).unwrap();
        for _ in 0..30 {
            let (e, a) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
            let f = random_prenex(&mut rng, sig, e, a);
            let (want, cs) = decide_classic(&p, &f, ClassicOptions::default()).unwrap();
            let (got, st) = decide_sigma2(&p, &f, FragmentOptions::default()).unwrap();
            assert_eq!(got, want, "{name}: {f}");
            subsets += st.peak_subsets;
            classic_states += cs.max_states;
        }
    }
    assert!(subsets < classic_states, "{subsets} subsets vs {classic_states} classic states");
}

#[test]
fn fragments_agree_with_finite_models() {
    let sig = [("r", 2), ("u", 1)];
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..40 {
        let p = random_finite_presentation(&mut rng, &sig);
        let model = FiniteModel::of(&p, 2);
        let e = rng.gen_range(1..=3);
        let f = random_prenex(&mut rng, &sig, e, 0);
        assert_eq!(decide_sigma1(&p, &f, FragmentOptions::default()).unwrap().0, model.holds(&f), "{f}");
        let (e, a) = (rng.gen_range(0..=2), rng.gen_range(1..=2));
        let g = random_prenex(&mut rng, &sig, e, a);
        assert_eq!(decide_sigma2(&p, &g, FragmentOptions::default()).unwrap().0, model.holds(&g), "{g}");
    }
}
