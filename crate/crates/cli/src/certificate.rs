//! Counterexample documents and their isolated re-checks.
//!
//! A certificate is an ALT document whose `check` line names the failed
//! property and whose element sets hold the configuration. [`recheck`]
//! evaluates that single property on the document alone.

use nilgen_core::alt_system::{check_embedding, search_embedding, AltSystem};
use nilgen_core::baer_group::{
    group_from_system, group_law_holds, structural_subgroups, GroupElement,
};
use nilgen_core::format::Document;
use nilgen_core::fp_linalg::FVector;
use nilgen_core::fraisse::enumerate_catalog;
use nilgen_core::model_theory::{
    indep0_raw, ip_witness, su_rank_law_holds, subset_from_mask, tp2_build_and_check, D1Chain,
    KpLaw, KpViolation,
};
use nilgen_core::Error;

use crate::CliError;

const MUTATED_PREFIX: &str = "mutated-";

/// The deliberately broken relation behind `kp-suite --mutate`: drops every
/// instance whose left side is larger than its right side, which breaks
/// symmetry.
pub fn mutated_indep(a: &[GroupElement], b: &[GroupElement], c: &[GroupElement]) -> bool {
    indep0_raw(a, b, c) && a.len() <= c.len()
}

pub fn kp_certificate(sys: &AltSystem, v: &KpViolation, mutated: bool) -> Document {
    let name = if mutated {
        format!("{MUTATED_PREFIX}{}", v.law.name())
    } else {
        v.law.name().to_string()
    };
    let mut doc = Document::new(sys.clone())
        .with_set("a", v.a.clone())
        .with_set("b", v.b.clone())
        .with_set("c", v.c.clone());
    for (n, xs) in &v.extra {
        doc = doc.with_set(n, xs.clone());
    }
    doc.check = Some(name);
    doc
}

pub fn lift_all(sys: &AltSystem, vs: &[FVector]) -> Vec<GroupElement> {
    vs.iter()
        .map(|v| GroupElement::lift(v.clone(), sys.n()))
        .collect()
}

fn set<'a>(doc: &'a Document, name: &str) -> Result<&'a [GroupElement], CliError> {
    doc.set(name)
        .ok_or_else(|| CliError::Usage(format!("certificate lacks set {name:?}")))
}

/// True when the property named by `doc.check` still fails on the stored
/// configuration.
pub fn recheck(doc: &Document) -> Result<bool, CliError> {
    let Some(name) = doc.check.as_deref() else {
        return Err(CliError::Usage("certificate has no check line".into()));
    };
    let sys = &doc.file.sys;
    if let Some(law) = KpLaw::from_name(name.strip_prefix(MUTATED_PREFIX).unwrap_or(name)) {
        let v = KpViolation {
            law,
            trial: 0,
            a: set(doc, "a")?.to_vec(),
            b: set(doc, "b")?.to_vec(),
            c: set(doc, "c")?.to_vec(),
            extra: doc
                .sets
                .iter()
                .filter(|(n, _)| !["a", "b", "c"].contains(&n.as_str()))
                .cloned()
                .collect(),
        };
        return Ok(if name.starts_with(MUTATED_PREFIX) {
            v.recheck(&mutated_indep)
        } else {
            v.recheck(&indep0_raw)
        });
    }
    if let Some(law) = name.strip_prefix("sigma1-") {
        let g = group_from_system(sys);
        return Ok(!group_law_holds(&g, law, set(doc, "x")?)?);
    }
    if name == "sigma2" {
        return Ok(!structural_subgroups(&group_from_system(sys)).sigma2);
    }
    if let Some(rest) = name.strip_prefix("sigma3-t") {
        let (t, pair) = rest
            .split_once("-pair")
            .and_then(|(t, i)| Some((t.parse::<usize>().ok()?, i.parse::<usize>().ok()?)))
            .ok_or_else(|| CliError::Usage(format!("malformed check name {name:?}")))?;
        let catalog = enumerate_catalog(sys.prime().get() as u64, sys.n(), t)?;
        let pr = catalog
            .pairs
            .get(pair)
            .ok_or_else(|| CliError::Usage(format!("catalog has no pair {pair}")))?;
        let base = set(doc, "base")?;
        if base.len() != catalog.classes[pr.b].dim_v() {
            return Err(CliError::Usage("base does not match the pair".into()));
        }
        let partial: Vec<(usize, FVector)> = base.iter().map(|x| x.v.clone()).enumerate().collect();
        return Ok(search_embedding(&pr.a_rebased, sys, &partial)?.is_none());
    }
    if name == "su-rank" {
        let a = set(doc, "a")?;
        let [a] = a else {
            return Err(CliError::Usage("su-rank needs a single element a".into()));
        };
        return Ok(!su_rank_law_holds(a, set(doc, "b")?, set(doc, "c")?));
    }
    if let Some(mask) = name
        .strip_prefix("ip-s")
        .and_then(|m| m.parse::<u64>().ok())
    {
        let m = sys.dim_v() / 2;
        let w = ip_witness(sys.prime().get() as u64, m, &subset_from_mask(mask, m))?;
        return Ok(!w.verified() || set(doc, "x")? != [w.x]);
    }
    if name == "d1-chain" {
        let d = set(doc, "d")?;
        let e = set(doc, "e")?;
        let c = set(doc, "c")?;
        let [c] = c else {
            return Err(CliError::Usage("d1-chain needs a single element c".into()));
        };
        let chain = D1Chain {
            pairs: d.iter().cloned().zip(e.iter().cloned()).collect(),
            c: c.w.clone(),
            steps: Vec::new(),
        };
        let g = group_from_system(sys);
        let comm_ok = chain
            .pairs
            .iter()
            .all(|(x, y)| g.comm(x, y).map(|z| z.w == chain.c).unwrap_or(false));
        return Ok(!(comm_ok && check_embedding(&chain.comparison_embedding(&g)?)?));
    }
    if let Some(rest) = name.strip_prefix("tp2-r") {
        let parsed = (|| {
            let (r, rest) = rest.split_once("-c")?;
            let (c, f) = rest.split_once("-f")?;
            let f: Option<Vec<usize>> = f.split('.').map(|x| x.parse().ok()).collect();
            Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?, f?))
        })();
        let (rows, cols, f) =
            parsed.ok_or_else(|| CliError::Usage(format!("malformed check name {name:?}")))?;
        let rep = tp2_build_and_check(rows, cols, sys.prime().get() as u64, &[f])?;
        return Ok(!rep.path_failures.is_empty());
    }
    Err(CliError::Core(Error::InvalidArgument(format!(
        "unknown check {name:?}"
    ))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nilgen_core::fp_linalg::Prime;
    use nilgen_core::model_theory::central_product_of_planes;

    #[test]
    fn unknown_and_missing_checks() {
        let sys = AltSystem::zero(Prime::new(3).unwrap(), 1, 2).unwrap();
        let mut doc = Document::new(sys);
        assert!(recheck(&doc).is_err());
        doc.check = Some("no-such-law".into());
        assert!(recheck(&doc).is_err());
    }

    #[test]
    fn passing_configurations_do_not_refail() {
        let sys = central_product_of_planes(Prime::new(3).unwrap(), 2).unwrap();
        let g = group_from_system(&sys);
        let x = g.basis_element(0);
        let y = g.basis_element(2);
        let mut doc = Document::new(sys.clone())
            .with_set("a", vec![x.clone()])
            .with_set("b", vec![])
            .with_set("c", vec![y.clone()]);
        doc.check = Some("symmetry".into());
        assert!(!recheck(&doc).unwrap());
        doc.check = Some("sigma2".into());
        assert!(!recheck(&doc).unwrap());
        let mut d = Document::new(sys).with_set("x", vec![x]);
        d.check = Some("sigma1-exponent".into());
        assert!(!recheck(&d).unwrap());
    }
}
