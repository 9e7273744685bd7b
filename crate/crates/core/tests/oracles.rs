//! Checks against values frozen from `tests/oracles/oracle.py`.

use levy_transience::criteria::{
    criterion_11_continuous, criterion_11_discrete, criterion_12_sato_shepp,
};
use levy_transience::discretize::{bin_density, characteristics, jensen_gap, TestFunction};
use levy_transience::measures::{
    make_flat_core_power, make_power_law_lattice, make_stable_triplet, moment,
    stable_density_constant, Density, Normalization, SymmetricJumpLaw,
};
use levy_transience::network::{effective_resistance, flow_energy, paper_energy_bound};
use levy_transience::simulate::even_chain_criterion_with;
use levy_transience::verdict::Status;
use serde_json::Value;

fn oracle() -> Value {
    serde_json::from_str(include_str!("oracles/values.json")).unwrap()
}

fn get(v: &Value, path: &[&str]) -> f64 {
    path.iter().fold(v, |v, k| &v[*k]).as_f64().unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn normalizer_and_stable_constants() {
    let o = oracle();
    let law = make_power_law_lattice(0.5, true).unwrap();
    assert!(rel(law.mass(1), get(&o, &["power_lattice_0_5_normalizer"])) < 1e-13);
    assert!((law.total() - 1.0).abs() < 1e-10);
    assert!(
        rel(
            stable_density_constant(0.5, 1.0),
            get(&o, &["stable_k_0_5"])
        ) < 1e-13
    );
    let k1 = get(&o, &["stable_k_1"]);
    assert!(rel(stable_density_constant(1.0, 1.0), k1) < 1e-13);
    let nu = make_stable_triplet(1.0, 1.0).unwrap().nu.unwrap();
    assert!(rel(nu.density(100.0) * 1e4, k1) < 0.01);
}

#[test]
fn criterion_values_bracket_oracles() {
    let o = oracle();
    let z = get(&o, &["zeta_1_5"]);
    let v = criterion_11_discrete(&make_power_law_lattice(0.5, false).unwrap()).unwrap();
    assert_eq!(v.status, Status::Converges);
    assert!(v.partial_value <= z && z <= v.upper() * (1.0 + 1e-12));

    let nu = make_stable_triplet(0.5, 1.0).unwrap().nu.unwrap();
    let exact = get(&o, &["criterion_11_stable_0_5"]);
    let v = criterion_11_continuous(&nu).unwrap();
    assert!(v.partial_value <= exact * (1.0 + 1e-12) && exact <= v.upper() * (1.0 + 1e-12));

    let exact = get(&o, &["criterion_12_stable_0_5"]);
    let v = criterion_12_sato_shepp(&nu, true).unwrap();
    assert_eq!(v.status, Status::Converges);
    assert!(v.partial_value <= exact * (1.0 + 1e-9) && exact <= v.upper() * (1.0 + 1e-9));
}

#[test]
fn second_moment_partial_sum() {
    let o = oracle();
    let law = make_power_law_lattice(2.5, false).unwrap();
    let v = moment(&law, 2, 1e6).unwrap();
    assert_eq!(v.status, Status::Converges);
    assert!((v.partial_value - get(&o, &["moment_2_power_lattice_2_5_partial_1e6"])).abs() < 1e-6);
}

#[test]
fn gaussian_binning_and_expectation() {
    let o = oracle();
    let g = SymmetricJumpLaw::from_density(
        Density::gaussian(1.0).unwrap(),
        Normalization::Probability,
        "g",
    )
    .unwrap();
    let l = bin_density(&g, 1.0).unwrap();
    assert!(rel(l.mass(0), get(&o, &["gaussian_origin_bin"])) < 1e-12);
    let c = characteristics(&g, 1.0, &[TestFunction::cosine(1.0)]).unwrap();
    assert!(rel(c.tests["cos-1"], get(&o, &["gaussian_cos_expectation"])) < 1e-10);
}

#[test]
fn flow_energy_and_bounds() {
    let o = oracle();
    let law = make_power_law_lattice(0.5, false).unwrap();
    let far = get(&o, &["flow_energy_0_5_imax_20"]);
    let e = flow_energy(&law, 14).unwrap();
    assert!(e.bounds.lo <= far && far <= e.bounds.hi);
    let e20 = flow_energy(&law, 20).unwrap();
    assert!(rel(e20.bounds.lo, far) < 1e-12);
    for (alpha, key) in [(0.5, "paper_bound_0_5"), (0.25, "paper_bound_0_25")] {
        let exact = get(&o, &[key]);
        let p =
            paper_energy_bound(&make_power_law_lattice(alpha, false).unwrap(), 1_000_000).unwrap();
        assert!(
            p.lo <= exact * (1.0 + 1e-12) && exact <= p.hi * (1.0 + 1e-12),
            "{alpha}: {p:?} vs {exact}"
        );
        assert!(e.bounds.hi <= p.hi || alpha != 0.5);
    }
}

#[test]
fn resistance_matches_extended_precision() {
    let o = oracle();
    let law = make_power_law_lattice(0.5, false).unwrap();
    let mut last = 0.0;
    for n in [8u64, 16, 32, 64] {
        let exact = get(&o, &["resistance_0_5", &n.to_string()]);
        let p = effective_resistance(&law, n).unwrap();
        assert!(rel(p.r_eff, exact) < 1e-11, "{n}: {} vs {exact}", p.r_eff);
        assert!(p.lower <= exact * (1.0 + 1e-12) && exact <= p.upper * (1.0 + 1e-12));
        assert!(p.r_eff >= last);
        last = p.r_eff;
    }
}

#[test]
fn jensen_sides_bracket_oracle() {
    let o = oracle();
    let g = jensen_gap(&make_flat_core_power(1.5).unwrap(), 1_000_000).unwrap();
    let lhs = get(&o, &["jensen_flat_core_1_5", "lhs"]);
    let rhs = get(&o, &["jensen_flat_core_1_5", "rhs"]);
    assert!(g.lhs.partial_value <= lhs * (1.0 + 1e-12) && lhs <= g.lhs.upper() * (1.0 + 1e-12));
    assert!(g.rhs.partial_value <= rhs * (1.0 + 1e-12) && rhs <= g.rhs.upper() * (1.0 + 1e-12));
    assert!(g.inequality_holds && g.lhs.upper() <= g.rhs.partial_value);
}

#[test]
fn even_chain_series() {
    let o = oracle();
    let v = even_chain_criterion_with(0.25, 3.0, 1_000_000).unwrap();
    assert_eq!(v.status, Status::Converges);
    let direct = get(&o, &["even_chain_0_25_3", "partial_1e7"]);
    let total = get(&o, &["even_chain_0_25_3", "total"]);
    assert!(v.partial_value <= direct && direct <= v.upper());
    assert!(rel(v.upper(), total) < 1e-10);
}
