use ao_gibbs::hamiltonian::{BoundaryCondition, EnergyModel};
use ao_gibbs::model::{Configuration, MarkLaw, MarkedPoint, ModelParams, Window};
use ao_gibbs::sampling::rng_for;
use proptest::prelude::*;

fn params() -> ModelParams<f64> {
    ModelParams::new(2, 1.0, 1.0, 0.3, MarkLaw::uniform(0.1, 0.8).unwrap()).unwrap()
}

fn points() -> impl Strategy<Value = Vec<(f64, f64, f64)>> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0, 0.1f64..0.8), 0..12)
}

/// Keeps points in order while they respect the hardcore constraint.
fn hardcore_config(model: &EnergyModel<f64>, pts: &[(f64, f64, f64)]) -> Configuration<f64> {
    let mut c = Configuration::new(2);
    for &(x, y, r) in pts {
        let p = MarkedPoint::at([x, y, 0.0], r);
        if !model.point_conflicts(&c, &p, None) {
            let _ = c.insert(p);
        }
    }
    c
}

proptest! {
    #[test]
    fn energy_is_nonnegative_and_sandwiched(pts in points(), periodic in any::<bool>()) {
        let w = Window::lambda(2, 6.0).unwrap();
        let bc = if periodic { BoundaryCondition::Periodic } else { BoundaryCondition::Free };
        let model = EnergyModel::new(&params(), &w, bc).unwrap();
        let c = hardcore_config(&model, &pts);
        let mut rng = rng_for(0, "energy-props", 0);
        let h = model.conditional_energy(&c, &mut rng);
        prop_assert!(h.finite && h.area_term >= 0.0);
        let (lo, hi) = model.sandwich_bounds(&c);
        prop_assert!(h.area_term <= hi * (1.0 + 1e-9));
        if !periodic {
            prop_assert!(h.area_term >= lo * (1.0 - 1e-9));
        }
    }

    #[test]
    fn insertion_never_lowers_energy(pts in points(), extra in (-3.0f64..3.0, -3.0f64..3.0, 0.1f64..0.8)) {
        let w = Window::lambda(2, 6.0).unwrap();
        let model = EnergyModel::new(&params(), &w, BoundaryCondition::Free).unwrap();
        let c = hardcore_config(&model, &pts);
        let mut rng = rng_for(1, "energy-props", 0);
        let before = model.conditional_energy(&c, &mut rng);
        let mut more = c.clone();
        if more.insert(MarkedPoint::at([extra.0, extra.1, 0.0], extra.2)).is_ok() {
            let after = model.conditional_energy(&more, &mut rng);
            prop_assert!(!after.finite || after.area_term >= before.area_term - 1e-9);
        }
    }

    #[test]
    fn deltas_match_recomputation(pts in points(), extra in (-3.0f64..3.0, -3.0f64..3.0, 0.1f64..0.8)) {
        let w = Window::lambda(2, 6.0).unwrap();
        let model = EnergyModel::new(&params(), &w, BoundaryCondition::Periodic).unwrap();
        let c = hardcore_config(&model, &pts);
        let mut rng = rng_for(2, "energy-props", 0);
        let p = MarkedPoint::at([extra.0, extra.1, 0.0], extra.2);
        let delta = model.delta_insert(&c, &p, &mut rng);
        let mut more = c.clone();
        if delta.finite && more.insert(p).is_ok() {
            let h0 = model.conditional_energy(&c, &mut rng).area_term;
            let h1 = model.conditional_energy(&more, &mut rng).area_term;
            prop_assert!((h1 - h0 - delta.area_term).abs() < 1e-7 * (1.0 + h1));
        }
    }
}
