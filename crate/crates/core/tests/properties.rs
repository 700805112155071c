use infodist_core::dist::{convolve, default_grid, regularize};
use infodist_core::{Atom, MixedDistribution};
use proptest::prelude::*;

fn mixture() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((0.1f64..1.0, -2.0f64..2.0, 0.2f64..1.0), 1..=4).prop_map(|raw| {
        let total: f64 = raw.iter().map(|c| c.0).sum();
        raw.into_iter().map(|(w, m, s)| (w / total, m, s)).collect()
    })
}

/// Mixture with an optional atom carrying `atom_mass` at `atom_at`.
fn law(components: &[(f64, f64, f64)], atom: Option<(f64, f64)>) -> MixedDistribution {
    let g = MixedDistribution::gauss_mixture(components, None).unwrap();
    match atom {
        None => g,
        Some((at, mass)) => {
            let (_, d) = g.ac().unwrap();
            MixedDistribution::new(Some((1.0 - mass, d.clone())), vec![Atom::new(at, mass).unwrap()]).unwrap()
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn regularization_adds_noise_variance(
        c in mixture(),
        atom in prop::option::of((-3.0f64..3.0, 0.05f64..0.5)),
        sigma in 0.25f64..1.5,
    ) {
        let m = law(&c, atom);
        let (mean, var) = m.moments();
        let r = regularize(&m, sigma, default_grid(&m, sigma).unwrap()).unwrap();
        let (rm, rv) = r.density().mean_variance();
        prop_assert!((rm - mean).abs() < 1e-8, "mean {rm} vs {mean}");
        prop_assert!((rv - var - sigma * sigma).abs() < 1e-8, "variance {rv} vs {}", var + sigma * sigma);
        let peak = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        prop_assert!(r.density().values().iter().all(|&p| p <= peak * (1.0 + 1e-12)));
    }

    #[test]
    fn truncation_keeps_mass_and_bounds_variance(c in mixture(), level in 0.3f64..4.0) {
        let m = law(&c, None);
        let t = m.truncate(level).unwrap();
        let mass = t.ac().map_or(0.0, |(w, _)| w) + t.atoms().iter().map(|a| a.mass).sum::<f64>();
        prop_assert!((mass - 1.0).abs() < 1e-12);
        let (_, var) = t.moments();
        prop_assert!(var <= m.second_moment() + 1e-12);
        let (lo, hi) = t.support();
        prop_assert!(lo >= -level - 1e-9 && hi <= level + 1e-9);
    }

    #[test]
    fn convolution_commutes(a in mixture(), b in mixture()) {
        let h = 0.01;
        let da = MixedDistribution::gauss_mixture(&a, Some(h)).unwrap();
        let db = MixedDistribution::gauss_mixture(&b, Some(h)).unwrap();
        let (da, db) = (da.ac().unwrap().1, db.ac().unwrap().1);
        let ab = convolve(da, db).unwrap();
        let ba = convolve(db, da).unwrap();
        prop_assert_eq!(ab.len(), ba.len());
        prop_assert!((ab.x0() - ba.x0()).abs() < 1e-12);
        let sup = ab.values().iter().zip(ba.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(sup < 1e-12, "sup {sup}");
    }
}
