use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::alt_system::AltSystem;
use crate::baer_group::{group_from_system, trial_rng, GroupElement, NilGroup};
use crate::exec::Exec;
use crate::fp_linalg::{in_span, solve_linear, subspace_intersect, FMatrix, FVector};

use super::indep::{indep0_raw, local_base, vparts};

/// The laws exercised by [`kp_random_suite`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KpLaw {
    Symmetry,
    Monotonicity,
    Transitivity,
    FiniteCharacter,
    LocalCharacter,
    GeneratorInvariance,
}

impl KpLaw {
    pub const ALL: [KpLaw; 6] = [
        KpLaw::Symmetry,
        KpLaw::Monotonicity,
        KpLaw::Transitivity,
        KpLaw::FiniteCharacter,
        KpLaw::LocalCharacter,
        KpLaw::GeneratorInvariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KpLaw::Symmetry => "symmetry",
            KpLaw::Monotonicity => "monotonicity",
            KpLaw::Transitivity => "transitivity",
            KpLaw::FiniteCharacter => "finite-character",
            KpLaw::LocalCharacter => "local-character",
            KpLaw::GeneratorInvariance => "generator-invariance",
        }
    }

    pub fn from_name(s: &str) -> Option<KpLaw> {
        KpLaw::ALL.into_iter().find(|l| l.name() == s)
    }
}

impl fmt::Display for KpLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A configuration on which a law failed. `a ⫝_b c` is the instance
/// named by the law; `extra` holds the derived sets (subsets, the larger
/// base, the witness subconfiguration or the local base).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KpViolation {
    pub law: KpLaw,
    pub trial: u64,
    pub a: Vec<GroupElement>,
    pub b: Vec<GroupElement>,
    pub c: Vec<GroupElement>,
    pub extra: Vec<(String, Vec<GroupElement>)>,
}

impl KpViolation {
    fn extra(&self, name: &str) -> Option<&[GroupElement]> {
        self.extra
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Re-evaluates the named law on the stored configuration alone;
    /// true when it still fails under `indep`.
    pub fn recheck(&self, indep: &IndepFn) -> bool {
        let (a, b, c) = (&self.a[..], &self.b[..], &self.c[..]);
        let ind = indep(a, b, c);
        match self.law {
            KpLaw::Symmetry => ind != indep(c, b, a),
            KpLaw::Monotonicity => match (self.extra("A0"), self.extra("C0")) {
                (Some(a0), Some(c0)) => ind && !indep(a0, b, c0),
                _ => false,
            },
            KpLaw::Transitivity => match self.extra("B1") {
                Some(b1) => (indep(a, b, b1) && indep(a, b1, c)) != ind,
                None => false,
            },
            KpLaw::FiniteCharacter => match (self.extra("A0"), self.extra("C0")) {
                (Some(a0), Some(c0)) => !ind && indep(a0, b, c0),
                _ => !ind && dependence_witness(a, b, c).is_none(),
            },
            KpLaw::LocalCharacter => match self.extra("B0") {
                Some(b0) => !(b0.iter().all(|x| c.contains(x)) && indep(a, b0, c)),
                None => true,
            },
            KpLaw::GeneratorInvariance => {
                match (self.extra("A1"), self.extra("B1"), self.extra("C1")) {
                    (Some(a1), Some(b1), Some(c1)) => indep(a1, b1, c1) != ind,
                    _ => false,
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LawCount {
    pub checked: u64,
    pub passed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KpReport {
    pub trials: u64,
    pub seed: u64,
    /// Indexed like [`KpLaw::ALL`].
    pub counts: [LawCount; 6],
    pub violations: Vec<KpViolation>,
}

impl KpReport {
    pub fn count(&self, law: KpLaw) -> LawCount {
        self.counts[KpLaw::ALL.iter().position(|&l| l == law).expect("listed")]
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// An independence predicate `(A, B, C) ↦ A ⫝_B C`.
pub type IndepFn = dyn Fn(&[GroupElement], &[GroupElement], &[GroupElement]) -> bool + Sync;

pub fn kp_random_suite(d: &AltSystem, trials: u64, seed: u64) -> KpReport {
    kp_random_suite_with(Exec::default(), d, trials, seed, &indep0_raw)
}

/// The suite with an injectable independence predicate, so that a
/// corrupted predicate can be shown to be caught.
pub fn kp_random_suite_with(
    exec: Exec,
    d: &AltSystem,
    trials: u64,
    seed: u64,
    indep: &IndepFn,
) -> KpReport {
    let g = group_from_system(d);
    let outcomes = exec.map_range(trials as usize, |t| run_trial(&g, t as u64, seed, indep));
    let mut report = KpReport {
        trials,
        seed,
        counts: [LawCount::default(); 6],
        violations: Vec::new(),
    };
    for out in outcomes {
        for (law, ok) in out.checks {
            let slot =
                &mut report.counts[KpLaw::ALL.iter().position(|&l| l == law).expect("listed")];
            slot.checked += 1;
            slot.passed += ok as u64;
        }
        report.violations.extend(out.violations);
    }
    report
}

struct TrialOutcome {
    checks: Vec<(KpLaw, bool)>,
    violations: Vec<KpViolation>,
}

struct Trial<'a> {
    g: &'a NilGroup,
    idx: u64,
    indep: &'a IndepFn,
    a: Vec<GroupElement>,
    b: Vec<GroupElement>,
    c: Vec<GroupElement>,
    out: TrialOutcome,
}

impl Trial<'_> {
    fn record(&mut self, law: KpLaw, ok: bool, extra: Vec<(&str, Vec<GroupElement>)>) {
        self.out.checks.push((law, ok));
        if !ok {
            self.out.violations.push(KpViolation {
                law,
                trial: self.idx,
                a: self.a.clone(),
                b: self.b.clone(),
                c: self.c.clone(),
                extra: extra.into_iter().map(|(n, v)| (n.to_string(), v)).collect(),
            });
        }
    }
}

/// Random combination of `span` lifted with a random `P`-part.
fn element_in<R: Rng>(g: &NilGroup, span: &[FVector], rng: &mut R) -> GroupElement {
    let p = g.prime();
    let dim = g.system().dim_v();
    let v = span.iter().fold(FVector::zeros(p, dim), |acc, s| {
        acc.add(&s.scale(rng.gen_range(0..p.get())))
            .expect("same length")
    });
    let w = FVector::from_raw(
        p,
        (0..g.system().n())
            .map(|_| rng.gen_range(0..p.get()))
            .collect(),
    );
    GroupElement::new(v, w)
}

fn random_subset<R: Rng>(xs: &[GroupElement], rng: &mut R) -> Vec<GroupElement> {
    xs.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect()
}

/// Another generating list of the same substructure: shuffled, each
/// element moved by a random central element, plus a random product.
fn regenerate<R: Rng>(g: &NilGroup, xs: &[GroupElement], rng: &mut R) -> Vec<GroupElement> {
    let zero: Vec<FVector> = Vec::new();
    let mut out: Vec<GroupElement> = xs
        .iter()
        .map(|x| {
            g.mul(
                x,
                &GroupElement::central(element_in(g, &zero, rng).w, x.v.len()),
            )
            .expect("same group")
        })
        .collect();
    if !xs.is_empty() {
        let mut prod = g.identity();
        for x in xs {
            prod = g
                .mul(
                    &prod,
                    &g.pow(x, rng.gen_range(0..g.prime().get()) as i64)
                        .expect("same group"),
                )
                .expect("same group");
        }
        out.push(prod);
    }
    out.shuffle(rng);
    out
}

/// A vector of `span π(A ∪ B) ∩ span π(C ∪ B)` outside `span π(B)` and the
/// supports in `A` and `C` of one representation of it.
fn dependence_witness(
    a: &[GroupElement],
    b: &[GroupElement],
    c: &[GroupElement],
) -> Option<(Vec<GroupElement>, Vec<GroupElement>)> {
    let sb = vparts([b]);
    let inter = subspace_intersect(&vparts([a, b]), &vparts([c, b])).ok()?;
    let z = inter
        .into_iter()
        .find(|z| sb.is_empty() || !in_span(&sb, z).expect("same host"))?;
    let support = |xs: &[GroupElement]| -> Option<Vec<GroupElement>> {
        let cols = vparts([xs, b]);
        let m = FMatrix::from_columns(z.prime(), z.len(), &cols).ok()?;
        let coef = solve_linear(&m, &z).ok()??;
        Some(
            xs.iter()
                .zip(coef.coords())
                .filter(|(_, &c)| c != 0)
                .map(|(x, _)| x.clone())
                .collect(),
        )
    };
    Some((support(a)?, support(c)?))
}

fn run_trial(g: &NilGroup, idx: u64, seed: u64, indep: &IndepFn) -> TrialOutcome {
    let mut rng = trial_rng(seed, idx);
    let dim = g.system().dim_v();
    // draw from a small random subspace so that dependencies are common
    let ambient_dim = rng.gen_range(1..=dim.clamp(1, 5));
    let ambient: Vec<FVector> = (0..ambient_dim)
        .map(|_| element_in(g, &identity_basis(g), &mut rng).v)
        .collect();
    let mut draw = |lo: usize, hi: usize| -> Vec<GroupElement> {
        let k = rng_range(&mut rng, lo, hi);
        (0..k).map(|_| element_in(g, &ambient, &mut rng)).collect()
    };
    let a = draw(1, 3);
    let b = draw(0, 2);
    let c = draw(1, 3);
    let mut t = Trial {
        g,
        idx,
        indep,
        a,
        b,
        c,
        out: TrialOutcome {
            checks: Vec::new(),
            violations: Vec::new(),
        },
    };
    let (a, b, c) = (t.a.clone(), t.b.clone(), t.c.clone());
    let ind = (t.indep)(&a, &b, &c);

    let sym = (t.indep)(&c, &b, &a) == ind;
    t.record(KpLaw::Symmetry, sym, vec![]);

    if ind {
        let a2 = random_subset(&a, &mut rng);
        let c2 = random_subset(&c, &mut rng);
        let ok = (t.indep)(&a2, &b, &c2);
        t.record(KpLaw::Monotonicity, ok, vec![("A0", a2), ("C0", c2)]);
    }

    // B ⊆ B' ⊆ ⟨C ∪ B⟩
    let cb = vparts([&c[..], &b[..]]);
    let mut b_big = b.clone();
    for _ in 0..rng_range(&mut rng, 1, 2) {
        b_big.push(element_in(t.g, &cb, &mut rng));
    }
    let chained = (t.indep)(&a, &b, &b_big) && (t.indep)(&a, &b_big, &c);
    t.record(KpLaw::Transitivity, chained == ind, vec![("B1", b_big)]);

    if !ind {
        match dependence_witness(&a, &b, &c) {
            Some((a0, c0)) => {
                let fails = !(t.indep)(&a0, &b, &c0);
                t.record(KpLaw::FiniteCharacter, fails, vec![("A0", a0), ("C0", c0)]);
            }
            None => t.record(KpLaw::FiniteCharacter, false, vec![]),
        }
    }

    match local_base(t.g.system(), &a, &c) {
        Ok(b0) => {
            let ok = b0.iter().all(|x| c.contains(x)) && (t.indep)(&a, &b0, &c);
            t.record(KpLaw::LocalCharacter, ok, vec![("B0", b0)]);
        }
        Err(_) => t.record(KpLaw::LocalCharacter, false, vec![]),
    }

    let (a3, b3, c3) = (
        regenerate(t.g, &a, &mut rng),
        regenerate(t.g, &b, &mut rng),
        regenerate(t.g, &c, &mut rng),
    );
    let ok = (t.indep)(&a3, &b3, &c3) == ind;
    t.record(
        KpLaw::GeneratorInvariance,
        ok,
        vec![("A1", a3), ("B1", b3), ("C1", c3)],
    );
    t.out
}

fn rng_range<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo..=hi)
}

fn identity_basis(g: &NilGroup) -> Vec<FVector> {
    let dim = g.system().dim_v();
    (0..dim).map(|i| FVector::unit(g.prime(), dim, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_linalg::Prime;

    fn stage() -> AltSystem {
        let p = Prime::new(3).unwrap();
        let plane = AltSystem::plane(p, &FVector::from_ints(p, &[1])).unwrap();
        plane
            .orthogonal_sum(&plane)
            .unwrap()
            .orthogonal_sum(&plane)
            .unwrap()
    }

    #[test]
    fn correct_relation_has_no_violations() {
        let rep = kp_random_suite(&stage(), 300, 1);
        assert!(rep.passed(), "{:?}", rep.violations.first());
        assert_eq!(rep.count(KpLaw::Symmetry).checked, 300);
        assert!(rep.count(KpLaw::Monotonicity).checked > 0);
        assert!(rep.count(KpLaw::FiniteCharacter).checked > 0);
    }

    #[test]
    fn corrupted_relation_is_caught() {
        // ignores B on the C side
        let bad = |a: &[GroupElement], b: &[GroupElement], c: &[GroupElement]| {
            subspace_intersect(&vparts([a, b]), &vparts([c]))
                .unwrap()
                .is_empty()
        };
        let rep = kp_random_suite_with(Exec::default(), &stage(), 300, 1, &bad);
        assert!(!rep.passed());
        assert!(rep.violations.iter().any(|v| v.law == KpLaw::Symmetry));
        assert!(rep.violations.iter().all(|v| v.recheck(&bad)));
        assert!(rep.violations.iter().all(|v| !v.recheck(&indep0_raw)));
        let negated =
            |a: &[GroupElement], b: &[GroupElement], c: &[GroupElement]| !indep0_raw(a, b, c);
        let rep = kp_random_suite_with(Exec::default(), &stage(), 100, 1, &negated);
        assert!(rep
            .violations
            .iter()
            .any(|v| v.law == KpLaw::LocalCharacter));
    }

    #[test]
    fn zero_trials_and_determinism() {
        let rep = kp_random_suite(&stage(), 0, 5);
        assert_eq!(rep.counts, [LawCount::default(); 6]);
        assert!(rep.violations.is_empty());
        let a = kp_random_suite_with(Exec::Sequential, &stage(), 50, 9, &indep0_raw);
        let b = kp_random_suite_with(Exec::Parallel, &stage(), 50, 9, &indep0_raw);
        assert_eq!(a, b);
    }
}
