//! Constructors for the locally stable state-set families.
//!
//! Each constructor validates its dimension hypotheses and returns the
//! states in subscript order with the stopper last. All sets are checked
//! pairwise orthogonal at construction.

use crate::coeff::Coefficient;
use crate::error::{Error, Result};
use crate::state::{BasisTerm, PureState, StateSet, SystemShape};

/// Orthogonality tolerance every constructed set must meet.
pub const CONSTRUCTION_ORTHO_TOL: f64 = 1e-12;

/// The all-plus full product state: every label tuple with coefficient 1.
pub fn stopper_state(shape: &SystemShape) -> PureState {
    let terms = shape
        .basis_labels()
        .map(|labels| BasisTerm::new(labels, Coefficient::one()))
        .collect();
    PureState::new(shape.clone(), terms).expect("stopper labels are in range")
}

/// `w_p^t`, with the two-term case kept as a plain sign so that the
/// general band rule reproduces the printed `|...> - |...>` forms.
fn band_phase(t: i64, p: i64) -> Coefficient {
    if p <= 2 {
        if t % 2 == 0 {
            Coefficient::one()
        } else {
            Coefficient::integer(-1)
        }
    } else {
        Coefficient::root_of_unity(t, p).expect("p > 0")
    }
}

/// Tuple of zeros with `value` at `slot`.
fn single(n: usize, slot: usize, value: u32) -> Vec<u32> {
    let mut labels = vec![0u32; n];
    labels[slot] = value;
    labels
}

fn two_term(shape: &SystemShape, a: Vec<u32>, b: Vec<u32>) -> PureState {
    PureState::new(
        shape.clone(),
        vec![
            BasisTerm::new(a, Coefficient::one()),
            BasisTerm::new(b, Coefficient::integer(-1)),
        ],
    )
    .expect("labels in range")
}

fn finish(shape: SystemShape, states: Vec<PureState>) -> StateSet {
    let mut names: Vec<String> = (0..states.len() - 1).map(|i| format!("phi_{i}")).collect();
    names.push("S".into());
    StateSet::new_orthogonal(shape, states, CONSTRUCTION_ORTHO_TOL)
        .expect("constructed set is orthogonal")
        .with_names(names)
        .expect("one name per state")
}

/// `d + 1` states in `d x d`: `phi_0 = |00> - |1k>`, `phi_i = |i0> - |0i>`,
/// and the stopper. The off-index `k` defaults to 2.
pub fn bipartite_equal(d: u32, k: u32) -> Result<StateSet> {
    if d < 3 {
        return Err(Error::Hypothesis {
            family: "bipartite_equal",
            hypothesis: "d >= 3",
            given: format!("d = {d}"),
        });
    }
    if !(2..=d - 1).contains(&k) {
        return Err(Error::Hypothesis {
            family: "bipartite_equal",
            hypothesis: "2 <= k <= d-1",
            given: format!("k = {k}, d = {d}"),
        });
    }
    let shape = SystemShape::new(vec![d, d])?;
    let mut states = vec![two_term(&shape, vec![0, 0], vec![1, k])];
    for i in 1..d {
        states.push(two_term(&shape, vec![i, 0], vec![0, i]));
    }
    states.push(stopper_state(&shape));
    Ok(finish(shape, states))
}

/// `d2 + 1` states in `d1 x d2` with the extra column band
/// `phi_j = |0j> - |2(j-1)>` for `d1 <= j <= d2-1`.
pub fn bipartite_general(d1: u32, d2: u32) -> Result<StateSet> {
    if d1 < 3 || d1 > d2 {
        return Err(Error::Hypothesis {
            family: "bipartite_general",
            hypothesis: "3 <= d1 <= d2",
            given: format!("d1 = {d1}, d2 = {d2}"),
        });
    }
    let shape = SystemShape::new(vec![d1, d2])?;
    let mut states = vec![two_term(&shape, vec![0, 0], vec![1, 2])];
    for i in 1..d1 {
        states.push(two_term(&shape, vec![i, 0], vec![0, i]));
    }
    for j in d1..d2 {
        states.push(two_term(&shape, vec![0, j], vec![2, j - 1]));
    }
    states.push(stopper_state(&shape));
    Ok(finish(shape, states))
}

/// `d + 1` states in `d^(x n)`: `phi_0 = |0...0> - |1...1>` and the
/// cyclic-phase band `phi_i = sum_t w_n^t |0..0 i 0..0>` (`i` in slot `t`).
pub fn multipartite_equal(d: u32, n: u32) -> Result<StateSet> {
    if d < 2 {
        return Err(Error::Hypothesis {
            family: "multipartite_equal",
            hypothesis: "d >= 2",
            given: format!("d = {d}"),
        });
    }
    if n < 3 {
        return Err(Error::Hypothesis {
            family: "multipartite_equal",
            hypothesis: "n >= 3",
            given: format!("n = {n}"),
        });
    }
    let n = n as usize;
    let shape = SystemShape::new(vec![d; n])?;
    let mut states = vec![two_term(&shape, vec![0; n], vec![1; n])];
    for i in 1..d {
        let terms = (0..n)
            .map(|t| BasisTerm::new(single(n, t, i), band_phase(t as i64, n as i64)))
            .collect();
        states.push(PureState::new(shape.clone(), terms).expect("labels in range"));
    }
    states.push(stopper_state(&shape));
    Ok(finish(shape, states))
}

/// `d3 + 1` states in `d1 x d2 x d3` with four bands: the seed pair, the
/// `w_3`-phased band, the two-term middle band, and the shifted band
/// `phi_k = |00k> - |21(k-1)>`.
pub fn tripartite_general(d1: u32, d2: u32, d3: u32) -> Result<StateSet> {
    if d1 < 3 || d1 > d2 || d2 > d3 {
        return Err(Error::Hypothesis {
            family: "tripartite_general",
            hypothesis: "3 <= d1 <= d2 <= d3",
            given: format!("d1 = {d1}, d2 = {d2}, d3 = {d3}"),
        });
    }
    let shape = SystemShape::new(vec![d1, d2, d3])?;
    let w3 = |t: i64| Coefficient::root_of_unity(t, 3).expect("p > 0");
    let mut states = vec![two_term(&shape, vec![0, 0, 0], vec![1, 1, 1])];
    for i in 1..d1 {
        states.push(
            PureState::new(
                shape.clone(),
                vec![
                    BasisTerm::new(vec![i, 0, 0], w3(0)),
                    BasisTerm::new(vec![0, i, 0], w3(1)),
                    BasisTerm::new(vec![0, 0, i], w3(2)),
                ],
            )
            .expect("labels in range"),
        );
    }
    for j in d1..d2 {
        states.push(two_term(&shape, vec![0, j, 0], vec![0, 0, j]));
    }
    for k in d2..d3 {
        states.push(two_term(&shape, vec![0, 0, k], vec![2, 1, k - 1]));
    }
    states.push(stopper_state(&shape));
    Ok(finish(shape, states))
}

fn check_multipartite_dims(family: &'static str, dims: &[u32]) -> Result<()> {
    if dims.len() < 3 {
        return Err(Error::Hypothesis {
            family,
            hypothesis: "n >= 3",
            given: format!("n = {}", dims.len()),
        });
    }
    if dims[0] < 3 || dims.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Hypothesis {
            family,
            hypothesis: "3 <= d1 <= ... <= dn",
            given: format!("dims = {dims:?}"),
        });
    }
    Ok(())
}

/// Lower end of band `m` (1-based): `d_{m-1}` with `d_0 := 1`.
fn band_lower(dims: &[u32], m: usize) -> u32 {
    if m == 1 {
        1
    } else {
        dims[m - 2]
    }
}

/// `dn + 1` states in `d1 x ... x dn`. Band `m` (for `1 <= m <= n-1`)
/// places `i` in slots `m-1 .. n-1` with phases `w_{n-m+1}^t`; the last
/// band is `phi_i = |0...0 i> - |2 1...1 (i-1)>`; the stopper closes the
/// set. Empty bands (equal consecutive dims) contribute no states.
pub fn multipartite_general(dims: &[u32]) -> Result<StateSet> {
    check_multipartite_dims("multipartite_general", dims)?;
    let n = dims.len();
    let shape = SystemShape::new(dims.to_vec())?;
    let mut states = vec![two_term(&shape, vec![0; n], vec![1; n])];
    for m in 1..n {
        let p = (n - m + 1) as i64;
        for i in band_lower(dims, m)..dims[m - 1] {
            let terms = (0..=n - m)
                .map(|t| BasisTerm::new(single(n, m - 1 + t, i), band_phase(t as i64, p)))
                .collect();
            states.push(PureState::new(shape.clone(), terms).expect("labels in range"));
        }
    }
    for i in band_lower(dims, n)..dims[n - 1] {
        let mut shifted = vec![1u32; n];
        shifted[0] = 2;
        shifted[n - 1] = i - 1;
        states.push(two_term(&shape, single(n, n - 1, i), shifted));
    }
    states.push(stopper_state(&shape));
    Ok(finish(shape, states))
}

/// Variant of [`multipartite_general`] whose middle bands carry one extra
/// term `|1...1 0...0 i>` so every non-stopper state is genuinely
/// entangled across all bipartitions.
pub fn multipartite_genuine(dims: &[u32]) -> Result<StateSet> {
    check_multipartite_dims("multipartite_genuine", dims)?;
    let n = dims.len();
    let shape = SystemShape::new(dims.to_vec())?;
    let mut states = vec![two_term(&shape, vec![0; n], vec![1; n])];
    // band 1: same cyclic-phase shape as the plain construction
    for i in 1..dims[0] {
        let terms = (0..n)
            .map(|t| BasisTerm::new(single(n, t, i), band_phase(t as i64, n as i64)))
            .collect();
        states.push(PureState::new(shape.clone(), terms).expect("labels in range"));
    }
    // bands 2..n-1: n-m+1 shift terms plus the entangling trailer
    for m in 2..n {
        let p = (n - m + 2) as i64;
        for i in band_lower(dims, m)..dims[m - 1] {
            let mut terms: Vec<BasisTerm> = (0..=n - m)
                .map(|t| BasisTerm::new(single(n, m - 1 + t, i), band_phase(t as i64, p)))
                .collect();
            let mut trailer = vec![0u32; n];
            for slot in trailer.iter_mut().take(m - 1) {
                *slot = 1;
            }
            trailer[n - 1] = i;
            terms.push(BasisTerm::new(trailer, band_phase((n - m + 1) as i64, p)));
            states.push(PureState::new(shape.clone(), terms).expect("labels in range"));
        }
    }
    for i in band_lower(dims, n)..dims[n - 1] {
        let mut shifted = vec![1u32; n];
        shifted[0] = 2;
        shifted[n - 1] = i - 1;
        states.push(two_term(&shape, single(n, n - 1, i), shifted));
    }
    states.push(stopper_state(&shape));
    Ok(finish(shape, states))
}

/// Static description of one construction family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub hypothesis: &'static str,
    pub theorem: &'static str,
    pub description: &'static str,
}

/// Catalog of the construction families, for CLI discovery.
pub fn family_catalog() -> &'static [FamilyInfo] {
    &[
        FamilyInfo {
            name: "bipartite_equal",
            params: "d [--variant-k K]",
            hypothesis: "d >= 3; 2 <= k <= d-1",
            theorem: "Theorem 1",
            description:
                "d+1 states in C^d x C^d; seed |00>-|1k> plus the swap band and the stopper",
        },
        FamilyInfo {
            name: "bipartite_general",
            params: "d1 d2",
            hypothesis: "3 <= d1 <= d2",
            theorem: "Theorem 2",
            description: "d2+1 states in C^d1 x C^d2; adds the column band |0j>-|2(j-1)>",
        },
        FamilyInfo {
            name: "multipartite_equal",
            params: "d n",
            hypothesis: "d >= 2, n >= 3",
            theorem: "Theorem 3",
            description: "d+1 states in (C^d)^n; cyclic w_n phases over single-excitation slots",
        },
        FamilyInfo {
            name: "tripartite_general",
            params: "d1 d2 d3",
            hypothesis: "3 <= d1 <= d2 <= d3",
            theorem: "Theorem 4",
            description: "d3+1 states in C^d1 x C^d2 x C^d3 with four bands",
        },
        FamilyInfo {
            name: "multipartite_general",
            params: "d1 d2 ... dn",
            hypothesis: "n >= 3; 3 <= d1 <= ... <= dn",
            theorem: "Theorem 5",
            description: "dn+1 states in C^d1 x ... x C^dn; banded single-excitation phases",
        },
        FamilyInfo {
            name: "multipartite_genuine",
            params: "d1 d2 ... dn",
            hypothesis: "n >= 3; 3 <= d1 <= ... <= dn",
            theorem: "Theorem 6",
            description: "dn genuinely entangled states plus the stopper product state",
        },
    ]
}

/// Constructs a family by catalog name. `variant_k` is honored only by
/// `bipartite_equal` (its seed-state column offset).
pub fn construct(name: &str, params: &[u32], variant_k: Option<u32>) -> Result<StateSet> {
    let arity_err = |family: &'static str, hypothesis: &'static str| Error::Hypothesis {
        family,
        hypothesis,
        given: format!("{} parameter(s)", params.len()),
    };
    match name {
        "bipartite_equal" => {
            let [d] = params else {
                return Err(arity_err("bipartite_equal", "exactly one parameter d"));
            };
            bipartite_equal(*d, variant_k.unwrap_or(2))
        }
        "bipartite_general" => {
            let [d1, d2] = params else {
                return Err(arity_err(
                    "bipartite_general",
                    "exactly two parameters d1 d2",
                ));
            };
            bipartite_general(*d1, *d2)
        }
        "multipartite_equal" => {
            let [d, n] = params else {
                return Err(arity_err(
                    "multipartite_equal",
                    "exactly two parameters d n",
                ));
            };
            multipartite_equal(*d, *n)
        }
        "tripartite_general" => {
            let [d1, d2, d3] = params else {
                return Err(arity_err(
                    "tripartite_general",
                    "exactly three parameters d1 d2 d3",
                ));
            };
            tripartite_general(*d1, *d2, *d3)
        }
        "multipartite_general" => multipartite_general(params),
        "multipartite_genuine" => multipartite_genuine(params),
        other => Err(Error::InvalidDocument(format!(
            "unknown family '{other}'; known: {}",
            family_catalog()
                .iter()
                .map(|f| f.name)
                .collect::<Vec<_>>()
                .join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::is_orthogonal_set;

    #[test]
    fn stopper_term_counts() {
        let s22 = stopper_state(&SystemShape::new(vec![2, 2]).unwrap());
        assert_eq!(s22.num_terms(), 4);
        assert!(s22.terms().iter().all(|t| t.coeff == Coefficient::one()));
        let s33 = stopper_state(&SystemShape::new(vec![3, 3]).unwrap());
        assert_eq!(s33.num_terms(), 9);
        let s334 = stopper_state(&SystemShape::new(vec![3, 3, 4]).unwrap());
        assert_eq!(s334.num_terms(), 36);
    }

    #[test]
    fn bipartite_equal_shapes() {
        let set = bipartite_equal(3, 2).unwrap();
        assert_eq!(set.len(), 4);
        assert_eq!(set.states()[0].terms()[0].labels, vec![0, 0]);
        assert_eq!(set.states()[0].terms()[1].labels, vec![1, 2]);
        assert_eq!(set.names().last().unwrap(), "S");

        let set5 = bipartite_equal(5, 2).unwrap();
        assert_eq!(set5.len(), 6);
        // phi_4 = |40> - |04>
        let phi4 = &set5.states()[4];
        assert_eq!(phi4.terms()[0].labels, vec![0, 4]);
        assert_eq!(phi4.terms()[0].coeff, Coefficient::integer(-1));
        assert_eq!(phi4.terms()[1].labels, vec![4, 0]);

        assert!(matches!(
            bipartite_equal(3, 1),
            Err(Error::Hypothesis {
                hypothesis: "2 <= k <= d-1",
                ..
            })
        ));
        assert!(matches!(
            bipartite_equal(2, 2),
            Err(Error::Hypothesis {
                hypothesis: "d >= 3",
                ..
            })
        ));
    }

    #[test]
    fn bipartite_general_bands() {
        let set = bipartite_general(5, 9).unwrap();
        assert_eq!(set.len(), 10);
        // phi_6 = |06> - |25>
        let phi6 = &set.states()[6];
        assert_eq!(phi6.terms()[0].labels, vec![0, 6]);
        assert_eq!(phi6.terms()[1].labels, vec![2, 5]);

        // empty column band
        let eq33 = bipartite_general(3, 3).unwrap();
        assert_eq!(eq33.states(), bipartite_equal(3, 2).unwrap().states());

        assert!(bipartite_general(2, 5).is_err());
    }

    #[test]
    fn multipartite_equal_bands() {
        let set = multipartite_equal(5, 3).unwrap();
        assert_eq!(set.len(), 6);
        // phi_4 = |400> + w_3|040> + w_3^2|004>
        let phi4 = &set.states()[4];
        assert_eq!(phi4.num_terms(), 3);
        let by_labels = |labels: &[u32]| {
            phi4.terms()
                .iter()
                .find(|t| t.labels == labels)
                .unwrap()
                .coeff
        };
        assert_eq!(by_labels(&[4, 0, 0]), Coefficient::one());
        assert_eq!(
            by_labels(&[0, 4, 0]),
            Coefficient::root_of_unity(1, 3).unwrap()
        );
        assert_eq!(
            by_labels(&[0, 0, 4]),
            Coefficient::root_of_unity(2, 3).unwrap()
        );

        assert_eq!(multipartite_equal(2, 3).unwrap().len(), 3);
        assert!(multipartite_equal(2, 2).is_err());
    }

    #[test]
    fn tripartite_general_bands() {
        let set = tripartite_general(5, 7, 10).unwrap();
        assert_eq!(set.len(), 11);
        // phi_9 = |009> - |218>
        let phi9 = &set.states()[9];
        assert_eq!(phi9.terms()[0].labels, vec![0, 0, 9]);
        assert_eq!(phi9.terms()[1].labels, vec![2, 1, 8]);

        let degenerate = tripartite_general(3, 3, 3).unwrap();
        assert_eq!(
            degenerate.states(),
            multipartite_equal(3, 3).unwrap().states()
        );

        assert!(tripartite_general(4, 3, 5).is_err());
    }

    #[test]
    fn multipartite_general_matches_tripartite() {
        let a = multipartite_general(&[5, 7, 10]).unwrap();
        let b = tripartite_general(5, 7, 10).unwrap();
        assert_eq!(a.states(), b.states());

        let c = multipartite_general(&[3, 4, 5, 6]).unwrap();
        assert_eq!(c.len(), 7);
        // band-2 states have 3 terms with phases 1, w_3, w_3^2
        let phi3 = &c.states()[3];
        assert_eq!(phi3.num_terms(), 3);
        let phases: Vec<Coefficient> = phi3.terms().iter().map(|t| t.coeff).collect();
        assert!(phases.contains(&Coefficient::one()));
        assert!(phases.contains(&Coefficient::root_of_unity(1, 3).unwrap()));
        assert!(phases.contains(&Coefficient::root_of_unity(2, 3).unwrap()));

        assert!(multipartite_general(&[3, 3]).is_err());
        assert!(multipartite_general(&[2, 3, 4]).is_err());
    }

    #[test]
    fn multipartite_general_equal_dims_matches_equal_family() {
        let a = multipartite_general(&[4, 4, 4]).unwrap();
        let b = multipartite_equal(4, 3).unwrap();
        assert_eq!(a.states(), b.states());
    }

    #[test]
    fn multipartite_genuine_band_shapes() {
        // n = 3: band n-1 = 2 states look like |0i0> + w_3|00i> + w_3^2|10i>
        let set = multipartite_genuine(&[3, 4, 5]).unwrap();
        assert_eq!(set.len(), 6);
        let phi3 = &set.states()[3];
        assert_eq!(phi3.num_terms(), 3);
        let by_labels = |labels: &[u32]| {
            phi3.terms()
                .iter()
                .find(|t| t.labels == labels)
                .unwrap()
                .coeff
        };
        assert_eq!(by_labels(&[0, 3, 0]), Coefficient::one());
        assert_eq!(
            by_labels(&[0, 0, 3]),
            Coefficient::root_of_unity(1, 3).unwrap()
        );
        assert_eq!(
            by_labels(&[1, 0, 3]),
            Coefficient::root_of_unity(2, 3).unwrap()
        );

        // n = 4 with a nonempty band 2: states carry n - m + 2 = 4 terms
        let set4 = multipartite_genuine(&[3, 4, 4, 4]).unwrap();
        let phi3 = &set4.states()[3];
        assert_eq!(phi3.num_terms(), 4);
        let w4 = |t| Coefficient::root_of_unity(t, 4).unwrap();
        let find = |labels: &[u32]| {
            phi3.terms()
                .iter()
                .find(|t| t.labels == labels)
                .unwrap()
                .coeff
        };
        assert_eq!(find(&[0, 3, 0, 0]), Coefficient::one());
        assert_eq!(find(&[0, 0, 3, 0]), w4(1));
        assert_eq!(find(&[0, 0, 0, 3]), w4(2));
        assert_eq!(find(&[1, 0, 0, 3]), w4(3));

        assert!(multipartite_genuine(&[2, 3, 4]).is_err());
    }

    #[test]
    fn genuine_equal_count() {
        let set = multipartite_genuine(&[3, 3, 4]).unwrap();
        assert_eq!(set.len(), 5);
    }

    #[test]
    fn all_families_orthogonal_and_sized() {
        let sets: Vec<StateSet> = vec![
            bipartite_equal(4, 2).unwrap(),
            bipartite_equal(5, 3).unwrap(),
            bipartite_general(3, 6).unwrap(),
            multipartite_equal(3, 4).unwrap(),
            tripartite_general(3, 4, 5).unwrap(),
            multipartite_general(&[3, 3, 4, 4, 5]).unwrap(),
            multipartite_genuine(&[3, 4, 5, 6]).unwrap(),
        ];
        for set in &sets {
            let (ok, pair) = is_orthogonal_set(set, 1e-12);
            assert!(ok, "non-orthogonal pair {pair:?}");
            let max_dim = *set.shape().dims().iter().max().unwrap() as usize;
            assert_eq!(set.len(), max_dim + 1);
            assert!(set.stopper_index().is_some());
        }
    }

    #[test]
    fn band_ranges_tile_the_subscript_range() {
        // [1, d1-1], [d1, d2-1], ..., [d_{n-1}, dn-1] cover 1..dn-1 once
        for dims in [vec![3u32, 4, 5], vec![3, 3, 4, 4, 5], vec![4, 4, 4]] {
            let n = dims.len();
            let mut covered = Vec::new();
            for m in 1..=n {
                let lo = if m == 1 { 1 } else { dims[m - 2] };
                covered.extend(lo..dims[m - 1]);
            }
            let expected: Vec<u32> = (1..dims[n - 1]).collect();
            assert_eq!(covered, expected, "dims {dims:?}");
        }
    }

    #[test]
    fn catalog_is_complete() {
        let catalog = family_catalog();
        assert_eq!(catalog.len(), 6);
        let be = catalog
            .iter()
            .find(|f| f.name == "bipartite_equal")
            .unwrap();
        assert!(be.hypothesis.contains("d >= 3"));
        let allowed = [
            "Theorem 1",
            "Theorem 2",
            "Theorem 3",
            "Theorem 4",
            "Theorem 5",
            "Theorem 6",
        ];
        for entry in catalog {
            assert!(allowed.contains(&entry.theorem));
            assert!(construct(entry.name, &[], None).is_err());
        }
        assert!(construct("no_such_family", &[3], None).is_err());
    }
}
