use std::fs;

use nilgen_core::alt_system::{
    amalgamate, amalgamate_with, check_embedding, free_exterior_system, is_isomorphic,
    search_embedding, AltSystem, Embedding,
};
use nilgen_core::baer_group::{
    check_group_laws, group_from_system, structural_subgroups, GroupElement,
};
use nilgen_core::format::{serialize_document, AltFile, Document, Meta};
use nilgen_core::fp_linalg::FVector;
use nilgen_core::fraisse::{
    build_generic_with, check_extension_property_with, enumerate_catalog, partial_iso_from_types,
    qf_type_code, BuildOptions, CheckBudget, Filler,
};
use nilgen_core::model_theory::{
    all_paths, existence_extend, extract_d1_chain, indep0_raw, independence_amalgam, ip_witness,
    kp_random_suite_with, local_base, pad_elements, relocate, su_rank_exhaustive, subset_from_mask,
    tp2_build_and_check, KpLaw,
};
use nilgen_core::Exec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificate::{kp_certificate, lift_all, mutated_indep};
use crate::report::{coord_list, coords, RunReport};
use crate::{load_alt, load_doc, save_alt, save_doc, write, CliError, CliResult, Command, Output};

/// Exhaustive rank-one checks are limited to this dimension.
const SU_RANK_MAX_DIM: usize = 4;

/// Largest `m` for which `ip-witness` enumerates every subset.
const IP_ALL_SUBSETS_MAX: usize = 16;

fn set<'a>(doc: &'a Document, name: &str) -> CliResult<&'a [GroupElement]> {
    doc.set(name)
        .ok_or_else(|| CliError::Usage(format!("input has no set {name:?}")))
}

fn vs(xs: &[GroupElement]) -> Vec<FVector> {
    xs.iter().map(|x| x.v.clone()).collect()
}

fn flag(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

pub(crate) fn execute(cmd: Command, echo: String) -> CliResult<RunReport> {
    match cmd {
        Command::GenFree { p, rank, out } => gen_free(echo, p, rank, &out),
        Command::Amalgamate {
            input,
            other,
            base,
            random_filler,
            seed,
            out,
        } => {
            let a = load_alt(&input.input)?.sys;
            let c = load_alt(&other)?.sys;
            amalgamate_cmd(echo, &a, &c, base, random_filler, seed.seed, &out)
        }
        Command::BuildGeneric {
            p,
            n,
            t,
            rounds,
            budget,
            random_filler,
            seed,
            out,
        } => {
            let mut opts = BuildOptions::default();
            if let Some(b) = budget {
                opts.embedding_budget = b;
            }
            if random_filler {
                opts.filler = Filler::Random;
            }
            build_generic_cmd(echo, p, n, t, rounds, seed.seed, opts, &out)
        }
        Command::CheckSigma {
            input,
            t,
            axiom,
            budget,
            trials,
            seed,
        } => {
            let sys = load_alt(&input.input)?.sys;
            let axioms = if axiom.is_empty() {
                vec![1, 2, 3]
            } else {
                axiom
            };
            check_sigma(echo, &sys, t, &axioms, budget, trials, seed.seed)
        }
        Command::Classify { input } => classify(echo, &load_alt(&input.input)?.sys),
        Command::Iso { input, other } => {
            let a = load_alt(&input.input)?.sys;
            let b = load_alt(&other)?.sys;
            let mut r = RunReport::new(echo, 0, false);
            r.field("isomorphic", flag(is_isomorphic(&a, &b)));
            Ok(r)
        }
        Command::Embed { input, other } => {
            let a = load_alt(&input.input)?.sys;
            let b = load_alt(&other)?.sys;
            let mut r = RunReport::new(echo, 0, false);
            match search_embedding(&a, &b, &[])? {
                Some(f) => {
                    r.field("found", "true");
                    r.field("verified", flag(check_embedding(&f)?));
                    r.field("images", coord_list(&f.images));
                }
                None => {
                    r.field("found", "false");
                }
            }
            Ok(r)
        }
        Command::Qftype { input } => qftype(echo, &load_doc(&input.input)?),
        Command::Indep { input } => {
            let doc = load_doc(&input.input)?;
            let mut r = RunReport::new(echo, 0, false);
            let ind = indep0_raw(set(&doc, "a")?, set(&doc, "b")?, set(&doc, "c")?);
            r.field("independent", flag(ind));
            Ok(r)
        }
        Command::LocalBase { input } => {
            let doc = load_doc(&input.input)?;
            let abar = set(&doc, "abar")?;
            let a = set(&doc, "a")?;
            let lb = local_base(&doc.file.sys, abar, a)?;
            let mut r = RunReport::new(echo, 0, false);
            r.field("size", lb.len());
            r.field("base", coord_list(&vs(&lb)));
            r.field("independent", flag(indep0_raw(abar, &lb, a)));
            Ok(r)
        }
        Command::KpSuite {
            input,
            trials,
            mutate,
            seed,
            out,
        } => kp_suite(
            echo,
            &load_alt(&input.input)?.sys,
            trials,
            mutate,
            seed.seed,
            &out,
        ),
        Command::SuRankCheck { input, prefix } => {
            let sys = load_alt(&input.input)?.sys;
            let sys = match prefix {
                Some(k) if k <= sys.dim_v() => sys.prefix(k),
                Some(k) => {
                    return Err(CliError::Usage(format!(
                        "prefix {k} exceeds dimV {}",
                        sys.dim_v()
                    )))
                }
                None => sys,
            };
            su_rank(echo, &sys)
        }
        Command::Existence {
            input,
            realize_in,
            out,
        } => {
            let doc = load_doc(&input.input)?;
            let host = realize_in
                .as_deref()
                .map(load_alt)
                .transpose()?
                .map(|f| f.sys);
            existence(echo, &doc, host.as_ref(), &out)
        }
        Command::IndepAmalgam { input, out } => indep_amalgam(echo, &load_doc(&input.input)?, &out),
        Command::IpWitness { p, m, subset } => ip(echo, p, m, subset),
        Command::ExtractD1 { input, k } => extract_d1(echo, &load_alt(&input.input)?.sys, k),
        Command::Tp2 {
            rows,
            cols,
            p,
            all_paths: all,
            path,
        } => {
            let paths = if all {
                all_paths(rows, cols)?
            } else if path.is_empty() {
                return Err(CliError::Usage(
                    "give --all-paths or at least one --path".into(),
                ));
            } else {
                path.iter()
                    .map(|s| {
                        s.split(',')
                            .map(|x| x.trim().parse::<usize>())
                            .collect::<Result<Vec<_>, _>>()
                            .map_err(|_| CliError::Usage(format!("bad path {s:?}")))
                    })
                    .collect::<CliResult<Vec<_>>>()?
            };
            tp2(echo, rows, cols, p, &paths)
        }
    }
}

fn gen_free(echo: String, p: u64, rank: usize, out: &Output) -> CliResult<RunReport> {
    let free = free_exterior_system(rank, p)?;
    let sys = free.to_alt_system()?;
    save_alt(
        out,
        &AltFile {
            sys: sys.clone(),
            meta: None,
        },
    )?;
    let mut r = RunReport::new(echo, 0, false);
    r.field("rank", rank)
        .field("n", sys.n())
        .field("dim_v", sys.dim_v());
    Ok(r)
}

fn amalgamate_cmd(
    echo: String,
    a: &AltSystem,
    c: &AltSystem,
    base: usize,
    random_filler: bool,
    seed: u64,
    out: &Output,
) -> CliResult<RunReport> {
    if base > a.dim_v() || base > c.dim_v() {
        return Err(CliError::Usage(format!(
            "base {base} exceeds an input dimension"
        )));
    }
    let b = a.prefix(base);
    if c.prefix(base) != b {
        return Err(CliError::Usage(format!(
            "inputs differ on their first {base} coordinates"
        )));
    }
    let f_a = Embedding::prefix_inclusion(&b, a);
    let f_c = Embedding::prefix_inclusion(&b, c);
    let am = if random_filler {
        let rng = std::cell::RefCell::new(ChaCha8Rng::seed_from_u64(seed));
        let p = a.prime();
        let filler = |_: &FVector, _: &FVector| {
            let mut rng = rng.borrow_mut();
            let raw: Vec<i64> = (0..a.n())
                .map(|_| rng.gen_range(0..p.get() as i64))
                .collect();
            FVector::from_ints(p, &raw)
        };
        amalgamate_with(a, c, &b, &f_a, &f_c, &filler)?
    } else {
        amalgamate(a, c, &b, &f_a, &f_c)?
    };
    let square = f_a.then(&am.g_a)?.images == f_c.then(&am.g_c)?.images;
    save_alt(
        out,
        &AltFile {
            sys: am.d.clone(),
            meta: None,
        },
    )?;
    let mut r = RunReport::new(echo, seed, false);
    r.field("dim_a", a.dim_v())
        .field("dim_c", c.dim_v())
        .field("dim_b", base)
        .field("dim_d", am.d.dim_v())
        .field("g_a_embeds", flag(check_embedding(&am.g_a)?))
        .field("g_c_embeds", flag(check_embedding(&am.g_c)?))
        .field("square_commutes", flag(square));
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn build_generic_cmd(
    echo: String,
    p: u64,
    n: usize,
    t: usize,
    rounds: usize,
    seed: u64,
    opts: BuildOptions,
    out: &Output,
) -> CliResult<RunReport> {
    let g = build_generic_with(p, n, t, rounds, seed, opts)?;
    let file = AltFile {
        sys: g.sys.clone(),
        meta: Some(Meta {
            seed,
            rounds,
            history: Some(g.history.len()),
        }),
    };
    save_alt(out, &file)?;
    let mut r = RunReport::new(echo, seed, false);
    r.field("p", p)
        .field("n", n)
        .field("t", t)
        .field("rounds", rounds)
        .field("dim_v", g.sys.dim_v())
        .field("history", g.history.len())
        .field("radical_dim", g.sys.radical().len())
        .field("derived_dim", g.sys.derived_span().len())
        .field("complete", flag(g.complete))
        .field("history_verified", flag(g.verify_history()?));
    Ok(r)
}

fn check_sigma(
    echo: String,
    sys: &AltSystem,
    t: usize,
    axioms: &[u8],
    budget: Option<u64>,
    trials: usize,
    seed: u64,
) -> CliResult<RunReport> {
    let mut r = RunReport::new(echo, seed, true);
    let g = group_from_system(sys);
    for &ax in axioms {
        r.trials += 1;
        let ok = match ax {
            1 => {
                let laws = check_group_laws(&g, Exec::default(), trials, seed);
                r.field("sigma1_exhaustive", flag(laws.exhaustive));
                r.field("sigma1_triples", laws.triples);
                r.field("sigma1_failures", laws.failures.len());
                for f in &laws.failures {
                    let mut doc = Document::new(sys.clone()).with_set("x", f.elements.clone());
                    doc.check = Some(format!("sigma1-{}", f.law));
                    r.certify(doc);
                }
                laws.failures.is_empty()
            }
            2 => {
                let rep = structural_subgroups(&g);
                r.field("sigma2_radical_dim", rep.center_vspan.len());
                r.field("sigma2_derived_dim", rep.derived_pspan.len());
                if !rep.sigma2 {
                    let mut doc = Document::new(sys.clone())
                        .with_set("radical", lift_all(sys, &rep.center_vspan));
                    doc.check = Some("sigma2".into());
                    r.certify(doc);
                }
                rep.sigma2
            }
            _ => {
                let catalog = enumerate_catalog(sys.prime().get() as u64, sys.n(), t)?;
                let mut b = CheckBudget {
                    seed,
                    ..CheckBudget::default()
                };
                if let Some(e) = budget {
                    b.embeddings = e;
                }
                let rep = check_extension_property_with(Exec::default(), sys, t, &catalog, b)?;
                r.field("sigma3_t", t);
                r.field("sigma3_pairs", rep.pairs_checked);
                r.field("sigma3_embeddings", rep.embeddings_checked);
                r.field("sigma3_complete", flag(rep.complete));
                r.field("sigma3_failures", rep.failures.len());
                for f in &rep.failures {
                    let mut doc =
                        Document::new(sys.clone()).with_set("base", lift_all(sys, &f.base));
                    doc.check = Some(format!("sigma3-t{t}-pair{}", f.pair));
                    r.certify(doc);
                }
                rep.passed()
            }
        };
        r.field(&format!("sigma{ax}"), if ok { "pass" } else { "fail" });
        if ok {
            r.passes += 1;
        } else {
            r.failures += 1;
        }
    }
    Ok(r)
}

fn classify(echo: String, sys: &AltSystem) -> CliResult<RunReport> {
    let rep = structural_subgroups(&group_from_system(sys));
    let mut r = RunReport::new(echo, 0, false);
    r.field("p", sys.prime().get())
        .field("n", sys.n())
        .field("dim_v", sys.dim_v())
        .field("center_vspan", coord_list(&rep.center_vspan))
        .field("derived_pspan", coord_list(&rep.derived_pspan))
        .field("sigma1", flag(rep.sigma1))
        .field("sigma2", flag(rep.sigma2))
        .field("in_k_n", flag(rep.in_k_n))
        .field("extraspecial", flag(rep.extraspecial));
    Ok(r)
}

fn qftype(echo: String, doc: &Document) -> CliResult<RunReport> {
    let sys = &doc.file.sys;
    let a = set(doc, "a")?;
    let code = qf_type_code(sys, a)?;
    let mut r = RunReport::new(echo, 0, false);
    r.field("k", code.k)
        .field("relations", coord_list(&code.relations));
    let gram: Vec<String> = code.gram.iter().map(|row| coord_list(row)).collect();
    r.field("gram", gram.join("|"));
    if let Some(b) = doc.set("b") {
        let equal = b.len() == a.len() && qf_type_code(sys, b)? == code;
        r.field("codes_equal", flag(equal));
        r.field(
            "partial_iso",
            flag(partial_iso_from_types(sys, a, b)?.is_some()),
        );
    }
    Ok(r)
}

fn kp_suite(
    echo: String,
    sys: &AltSystem,
    trials: u64,
    mutate: bool,
    seed: u64,
    out: &Output,
) -> CliResult<RunReport> {
    let rep = if mutate {
        kp_random_suite_with(Exec::default(), sys, trials, seed, &mutated_indep)
    } else {
        kp_random_suite_with(Exec::default(), sys, trials, seed, &indep0_raw)
    };
    let mut r = RunReport::new(echo, seed, true);
    r.trials = rep.trials;
    let mut bad_trials: Vec<u64> = rep.violations.iter().map(|v| v.trial).collect();
    bad_trials.dedup();
    r.failures = rep.violations.len() as u64;
    r.passes = rep.trials - bad_trials.len() as u64;
    r.field("mutated", flag(mutate));
    for law in KpLaw::ALL {
        let c = rep.count(law);
        r.field(&format!("{}_checked", law.name()), c.checked);
        r.field(&format!("{}_passed", law.name()), c.passed);
    }
    let docs: Vec<Document> = rep
        .violations
        .iter()
        .map(|v| kp_certificate(sys, v, mutate))
        .collect();
    if let (Some(dir), false) = (&out.out, docs.is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        for (i, d) in docs.iter().enumerate() {
            write(
                &dir.join(format!("certificate-{i:04}.alt")),
                &serialize_document(d),
            )?;
        }
    }
    for d in docs {
        r.certify(d);
    }
    Ok(r)
}

fn su_rank(echo: String, sys: &AltSystem) -> CliResult<RunReport> {
    let rep = su_rank_exhaustive(sys, SU_RANK_MAX_DIM)?;
    let mut r = RunReport::new(echo, 0, true);
    r.trials = rep.checked;
    r.failures = rep.discrepancies.len() as u64;
    r.passes = rep.checked - r.failures;
    r.field("dim_v", sys.dim_v());
    for d in &rep.discrepancies {
        let mut doc = Document::new(sys.clone())
            .with_set("a", lift_all(sys, std::slice::from_ref(&d.a)))
            .with_set("b", lift_all(sys, &d.b))
            .with_set("c", lift_all(sys, &d.c));
        doc.check = Some("su-rank".into());
        r.certify(doc);
    }
    Ok(r)
}

fn existence(
    echo: String,
    doc: &Document,
    host: Option<&AltSystem>,
    out: &Output,
) -> CliResult<RunReport> {
    let sys = &doc.file.sys;
    let (abar, b, a) = (set(doc, "abar")?, set(doc, "b")?, set(doc, "a")?);
    let ext = existence_extend(sys, abar, b, a)?;
    let big = &ext.sys;
    let (bp, ap) = (pad_elements(big, b), pad_elements(big, a));
    let with_b = |xs: &[GroupElement], bs: &[GroupElement]| {
        let mut t = xs.to_vec();
        t.extend_from_slice(bs);
        t
    };
    let same_type =
        qf_type_code(big, &with_b(&ext.witnesses, &bp))? == qf_type_code(sys, &with_b(abar, b))?;
    let mut r = RunReport::new(echo, 0, false);
    r.field("dim_before", sys.dim_v())
        .field("dim_after", big.dim_v())
        .field("type_preserved", flag(same_type))
        .field("independent", flag(indep0_raw(&ext.witnesses, &bp, &ap)))
        .field("witnesses", coord_list(&vs(&ext.witnesses)));
    let result = match host {
        Some(h) => match relocate(&ext, h)? {
            Some(ws) => {
                r.field("relocated", "true");
                r.field("host_witnesses", coord_list(&vs(&ws)));
                Document::new(h.clone()).with_set("witnesses", ws)
            }
            None => {
                r.field("relocated", "false");
                Document::new(big.clone()).with_set("witnesses", ext.witnesses.clone())
            }
        },
        None => Document::new(big.clone()).with_set("witnesses", ext.witnesses.clone()),
    };
    save_doc(out, &result)?;
    Ok(r)
}

fn indep_amalgam(echo: String, doc: &Document, out: &Output) -> CliResult<RunReport> {
    let sys = &doc.file.sys;
    let (m, a0, a1, b0, b1) = (
        set(doc, "m")?,
        set(doc, "a0")?,
        set(doc, "a1")?,
        set(doc, "b0")?,
        set(doc, "b1")?,
    );
    let ext = independence_amalgam(sys, m, a0, a1, b0, b1)?;
    let big = &ext.sys;
    let pad = |xs: &[GroupElement]| pad_elements(big, xs);
    let cat = |parts: &[&[GroupElement]]| parts.concat();
    let e = &ext.witnesses;
    let type0 =
        qf_type_code(big, &cat(&[e, &pad(m), &pad(b0)]))? == qf_type_code(sys, &cat(&[a0, m, b0]))?;
    let type1 =
        qf_type_code(big, &cat(&[e, &pad(m), &pad(b1)]))? == qf_type_code(sys, &cat(&[a1, m, b1]))?;
    let ind = indep0_raw(e, &pad(m), &cat(&[&pad(b0), &pad(b1)]));
    let mut r = RunReport::new(echo, 0, false);
    r.field("dim_before", sys.dim_v())
        .field("dim_after", big.dim_v())
        .field("type_over_b0", flag(type0))
        .field("type_over_b1", flag(type1))
        .field("independent", flag(ind))
        .field("witnesses", coord_list(&vs(e)));
    save_doc(out, &Document::new(big.clone()).with_set("e", e.clone()))?;
    Ok(r)
}

fn ip(echo: String, p: u64, m: usize, subset: Option<u64>) -> CliResult<RunReport> {
    let masks: Vec<u64> = match subset {
        Some(mask) => {
            if m < 64 && mask >> m != 0 {
                return Err(CliError::Usage(format!(
                    "subset mask {mask} has bits outside 0..{m}"
                )));
            }
            vec![mask]
        }
        None if m <= IP_ALL_SUBSETS_MAX => (0..1u64 << m).collect(),
        None => {
            return Err(CliError::Usage(format!(
                "m = {m} is too large to enumerate every subset"
            )))
        }
    };
    let mut r = RunReport::new(echo, 0, true);
    for mask in masks {
        let w = ip_witness(p, m, &subset_from_mask(mask, m))?;
        r.trials += 1;
        if w.verified() {
            r.passes += 1;
        } else {
            r.failures += 1;
            let mut doc = Document::new(w.group.system().clone()).with_set("x", vec![w.x.clone()]);
            doc.check = Some(format!("ip-s{mask}"));
            r.certify(doc);
        }
    }
    r.field("p", p).field("m", m);
    Ok(r)
}

fn extract_d1(echo: String, sys: &AltSystem, k: usize) -> CliResult<RunReport> {
    let g = group_from_system(sys);
    let chain = extract_d1_chain(&g, k)?;
    let emb = chain.comparison_embedding(&g)?;
    let ok = check_embedding(&emb)?;
    let mut r = RunReport::new(echo, 0, true);
    r.trials = 1;
    if ok {
        r.passes = 1;
    } else {
        r.failures = 1;
        let (d, e): (Vec<_>, Vec<_>) = chain.pairs.iter().cloned().unzip();
        let mut doc = Document::new(sys.clone())
            .with_set("d", d)
            .with_set("e", e)
            .with_set(
                "c",
                vec![GroupElement::central(chain.c.clone(), sys.dim_v())],
            );
        doc.check = Some("d1-chain".into());
        r.certify(doc);
    }
    let indices: Vec<String> = chain.steps.iter().map(|s| s.index().to_string()).collect();
    r.field("length", chain.pairs.len())
        .field("c", coords(&chain.c))
        .field("steps", chain.steps.len())
        .field("centralizer_indices", indices.join(","))
        .field("comparison_embeds", flag(ok));
    Ok(r)
}

fn tp2(
    echo: String,
    rows: usize,
    cols: usize,
    p: u64,
    paths: &[Vec<usize>],
) -> CliResult<RunReport> {
    let rep = tp2_build_and_check(rows, cols, p, paths)?;
    let mut r = RunReport::new(echo, 0, true);
    r.trials = (rep.row_pairs + rep.paths) as u64;
    r.passes = (rep.row_pairs_inconsistent + rep.paths_consistent) as u64;
    r.failures = (rep.row_failures.len() + rep.path_failures.len()) as u64;
    r.field("rows", rows)
        .field("cols", cols)
        .field("row_pairs", rep.row_pairs)
        .field("row_pairs_inconsistent", rep.row_pairs_inconsistent)
        .field("paths", rep.paths)
        .field("paths_consistent", rep.paths_consistent);
    let free = free_exterior_system(rows + 2 * rows * cols, p)?.to_alt_system()?;
    for &i in &rep.path_failures {
        let f: Vec<String> = paths[i].iter().map(usize::to_string).collect();
        let mut doc = Document::new(free.clone());
        doc.check = Some(format!("tp2-r{rows}-c{cols}-f{}", f.join(".")));
        r.certify(doc);
    }
    Ok(r)
}
