//! Property tests over the public API: algebraic invariants that must hold
//! for every admissible input, checked on randomized draws.

use finslerlab::phi::phi_cap_both_forms;
use finslerlab::{
    ab_scalars_generic, ab_scalars_kropina, parse_spec, s_curvature_kropina, BracketEntry,
    HomogeneousSpec, PhiModel, SquareMatrix, TangentVector,
};
use proptest::prelude::*;

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

/// Kropina exponent bounded away from the poles -1, 0, 1 of the closed
/// forms, where every route loses relative precision.
fn exponent() -> impl Strategy<Value = f64> {
    (-3.0..3.0f64).prop_filter("kropina exponent near a pole", |m| {
        (m + 1.0).abs() > 0.05 && m.abs() > 0.05 && (m - 1.0).abs() > 0.05
    })
}

/// (n, metric, bracket coefficients, v) with a well-conditioned metric and
/// 0 < b < 1. Brackets need not satisfy Jacobi; none of the quantities
/// under test require it.
fn spec_strategy() -> impl Strategy<Value = HomogeneousSpec> {
    (2usize..=4).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (
            proptest::collection::vec(-0.15..0.15f64, pairs),
            proptest::collection::vec(1.0..1.5f64, n),
            proptest::collection::vec(-1.0..1.0f64, pairs * n),
            proptest::collection::vec(0.1..1.0f64, n),
            0.3..0.8f64,
        )
            .prop_map(move |(off, diag, coefs, v_raw, b_target)| {
                let mut metric = SquareMatrix::identity(n);
                let mut idx = 0;
                for i in 0..n {
                    metric[(i, i)] = diag[i];
                    for j in (i + 1)..n {
                        metric[(i, j)] = off[idx];
                        metric[(j, i)] = off[idx];
                        idx += 1;
                    }
                }
                let mut entries = Vec::new();
                let mut c = 0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        for k in 0..n {
                            entries.push(BracketEntry {
                                i,
                                j,
                                k,
                                coef: coefs[c],
                            });
                            c += 1;
                        }
                    }
                }
                let probe =
                    HomogeneousSpec::new(n, metric.clone(), vec![0.0; n * n * n], v_raw.clone())
                        .unwrap();
                let scale = b_target / probe.b_squared().sqrt();
                let v = v_raw.iter().map(|x| x * scale).collect();
                HomogeneousSpec::from_entries(n, metric, &entries, v).unwrap()
            })
    })
}

proptest! {
    /// The slope s = beta/alpha obeys |s| <= b for every direction, by
    /// Cauchy-Schwarz in the metric inner product.
    #[test]
    fn slope_bounded_by_b(spec in spec_strategy(), seed in 0u64..1u64 << 48) {
        let y = &spec.sample_unit_directions(1, seed, 0.0).unwrap()[0];
        let (alpha, _, s) = spec.alpha_beta_s(y).unwrap();
        prop_assert!((alpha - 1.0).abs() < 1e-9, "sampled direction not unit: {alpha}");
        prop_assert!(s.abs() <= spec.b_squared().sqrt() + 1e-12);
    }

    /// The structure-constant table built from i < j entries is
    /// antisymmetric in its first two slots.
    #[test]
    fn bracket_antisymmetry(spec in spec_strategy()) {
        let n = spec.n();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    prop_assert_eq!(
                        spec.structure_constant(i, j, k),
                        -spec.structure_constant(j, i, k)
                    );
                }
            }
        }
    }

    /// Delta always equals 1 + s Q + (b^2 - s^2) Q', whichever route
    /// produced the scalars.
    #[test]
    fn delta_matches_its_definition(
        m in exponent(),
        b in 0.1..0.95f64,
        t in 0.06..0.99f64,
        n in 2usize..=6,
    ) {
        let s = t * b;
        for sc in [
            ab_scalars_kropina(m, s, b * b, n).unwrap(),
            ab_scalars_generic(&PhiModel::kropina(m).unwrap(), s, b * b, n).unwrap(),
        ] {
            let recomputed = 1.0 + s * sc.q + (b * b - s * s) * sc.qp;
            prop_assert!(
                rel_gap(sc.delta, recomputed) < 1e-12,
                "delta {} vs definition {}", sc.delta, recomputed
            );
        }
    }

    /// The two arrangements of Phi agree for smooth profiles too.
    #[test]
    fn phi_arrangements_agree(
        c1 in -0.5..0.5f64,
        c2 in -0.3..0.3f64,
        b in 0.1..0.9f64,
        t in -0.99..0.99f64,
        n in 2usize..=6,
    ) {
        let model = PhiModel::polynomial(vec![1.0, c1, c2]).unwrap();
        let s = t * b;
        if let Ok(sc) = ab_scalars_generic(&model, s, b * b, n) {
            let (a, bb) = phi_cap_both_forms(&sc);
            prop_assert!(rel_gap(a, bb) < 1e-12, "{a} vs {bb}");
        }
    }

    /// S is positively 1-homogeneous in y: the closed kropina form scales
    /// exactly with the direction.
    #[test]
    fn s_curvature_positive_homogeneity(
        spec in spec_strategy(),
        m in exponent(),
        seed in 0u64..1u64 << 48,
        lambda in 0.1..8.0f64,
    ) {
        let y = &spec.sample_unit_directions(1, seed, 0.05).unwrap()[0];
        let (_, _, s) = spec.alpha_beta_s(y).unwrap();
        let y = if m.fract() != 0.0 && s < 0.0 {
            TangentVector(y.as_slice().iter().map(|x| -x).collect())
        } else {
            y.clone()
        };
        let s1 = s_curvature_kropina(&spec, m, &y).unwrap();
        let s2 = s_curvature_kropina(&spec, m, &y.scaled(lambda)).unwrap();
        prop_assert!(rel_gap(s2, lambda * s1) < 1e-10, "{s2} vs {}", lambda * s1);
    }
}

/// End to end: a TOML description drives the same computation as the
/// directly constructed spec.
#[test]
fn toml_description_reproduces_benchmark() {
    let loaded = parse_spec(
        "n = 2\n\
         metric = [1.0, 0.0, 0.0, 1.0]\n\
         v = [0.5, 0.0]\n\n\
         [[brackets]]\n\
         i = 1\nj = 2\nk = 2\ncoef = 1.0\n\n\
         [phi]\nfamily = \"kropina\"\nm = 2.0\n",
    )
    .unwrap();
    assert_eq!(loaded.kropina_m, Some(2.0));
    let y = TangentVector(vec![1.0, 1.0]);
    let s = s_curvature_kropina(&loaded.space, 2.0, &y).unwrap();
    assert!(rel_gap(s, 16.0 / 9.0) < 1e-12, "S = {s}");
}
