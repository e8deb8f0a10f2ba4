use std::cell::RefCell;
use std::ops::ControlFlow;

use rand::Rng;

use crate::alt_system::{
    amalgamate_with, check_embedding, for_each_embedding, sample_embedding, search_embedding_with,
    AltSystem, Embedding,
};
use crate::baer_group::trial_rng;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fp_linalg::FVector;

use super::catalog::{enumerate_catalog, Catalog};

/// Default cap on `dimV` of a stage.
pub const DEFAULT_STAGE_CAP: usize = 24;

/// Default number of base embeddings examined per pair and round before
/// switching to seeded sampling.
pub const DEFAULT_EMBEDDING_BUDGET: u64 = 200_000;

/// Default number of seeded base samples once the budget overflows.
pub const DEFAULT_SAMPLED_BASES: u64 = 4096;

/// How `β_D(x, y)` is filled between the two new parts of an amalgam.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Filler {
    #[default]
    Zero,
    /// Uniform values drawn from the build seed.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub embedding_budget: u64,
    pub sampled_bases: u64,
    pub stage_cap: usize,
    pub filler: Filler,
    /// Runs the per-base extension pre-check; the result does not depend
    /// on it.
    pub exec: Exec,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            embedding_budget: DEFAULT_EMBEDDING_BUDGET,
            sampled_bases: DEFAULT_SAMPLED_BASES,
            stage_cap: DEFAULT_STAGE_CAP,
            filler: Filler::Zero,
            exec: Exec::default(),
        }
    }
}

/// One amalgamation of the stage with a catalog `A` over a copy of `B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmalgamationStep {
    pub pair: usize,
    /// Images of the `B` basis in the stage before the step.
    pub base: Vec<FVector>,
    /// Images of the rebased `A` basis in the stage after the step.
    pub extension: Vec<FVector>,
    pub dim_before: usize,
    pub dim_after: usize,
}

/// A finite stage of the limit chain. Every earlier stage is the prefix of
/// `sys` of length `dim_after` of its last step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericApprox {
    pub sys: AltSystem,
    pub history: Vec<AmalgamationStep>,
    pub seed: u64,
    pub t: usize,
    pub rounds: usize,
    /// False when some base enumeration was replaced by sampling.
    pub complete: bool,
    pub catalog: Catalog,
}

impl GenericApprox {
    /// Stage after `k` steps; `stage(0)` is the trivial system.
    pub fn stage(&self, k: usize) -> AltSystem {
        let dim = if k == 0 {
            0
        } else {
            self.history[k - 1].dim_after
        };
        self.sys.prefix(dim)
    }

    /// Re-checks every recorded step: the base was an embedding into the
    /// stage before, the extension is an embedding into the stage after that
    /// agrees with the base, and each stage embeds into the next.
    pub fn verify_history(&self) -> Result<bool> {
        let p = self.sys.prime();
        for (k, step) in self.history.iter().enumerate() {
            let before = self.stage(k);
            let after = self.stage(k + 1);
            let pair = &self.catalog.pairs[step.pair];
            let b = &self.catalog.classes[pair.b];
            let base = Embedding::new(b.clone(), before.clone(), step.base.clone());
            let ext = Embedding::new(
                pair.a_rebased.clone(),
                after.clone(),
                step.extension.clone(),
            );
            let chain = Embedding::prefix_inclusion(&before, &after);
            if !check_embedding(&base)? || !check_embedding(&ext)? || !check_embedding(&chain)? {
                return Ok(false);
            }
            let agrees = step
                .base
                .iter()
                .zip(&step.extension)
                .all(|(x, y)| pad(p, x, after.dim_v()) == *y);
            if !agrees {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn pad(p: crate::fp_linalg::Prime, x: &FVector, dim: usize) -> FVector {
    x.concat(&FVector::zeros(p, dim - x.len()))
}

pub fn build_generic(
    p: u64,
    n: usize,
    t: usize,
    rounds: usize,
    seed: u64,
) -> Result<GenericApprox> {
    build_generic_with(p, n, t, rounds, seed, BuildOptions::default())
}

pub fn build_generic_with(
    p: u64,
    n: usize,
    t: usize,
    rounds: usize,
    seed: u64,
    opts: BuildOptions,
) -> Result<GenericApprox> {
    if rounds == 0 {
        return Err(Error::InvalidArgument(
            "at least one round is required".into(),
        ));
    }
    let catalog = enumerate_catalog(p, n, t)?;
    build_from_catalog(catalog, t, rounds, seed, opts)
}

/// Chain construction over a prebuilt catalog covering `dimV ≤ t`.
pub fn build_from_catalog(
    catalog: Catalog,
    t: usize,
    rounds: usize,
    seed: u64,
    opts: BuildOptions,
) -> Result<GenericApprox> {
    if catalog.dmax < t {
        return Err(Error::InvalidArgument(format!(
            "catalog covers dimV <= {} but t = {t}",
            catalog.dmax
        )));
    }
    let p = catalog.p;
    let mut stage = AltSystem::trivial(p, catalog.n)?;
    let mut history: Vec<AmalgamationStep> = Vec::new();
    let mut complete = true;
    let filler_rng = RefCell::new(trial_rng(seed, u64::MAX));

    for round in 0..rounds {
        for (pid, pair) in catalog.pairs_up_to(t) {
            let b = &catalog.classes[pair.b];
            let snapshot = stage.clone();
            let stream = (round as u64) << 32 | pid as u64;
            let (bases, full) = base_embeddings(
                b,
                &snapshot,
                opts.embedding_budget,
                opts.sampled_bases,
                seed,
                stream,
            )?;
            complete &= full;
            // an extension inside the snapshot survives in every later stage
            let covered = opts.exec.map(&bases, |base| {
                let partial: Vec<(usize, FVector)> = base.iter().cloned().enumerate().collect();
                search_embedding_with(Exec::Sequential, &pair.a_rebased, &snapshot, &partial)
                    .map(|e| e.is_some())
            });
            for (base, covered) in bases.into_iter().zip(covered) {
                if covered? {
                    continue;
                }
                let padded: Vec<FVector> = base.iter().map(|x| pad(p, x, stage.dim_v())).collect();
                let partial: Vec<(usize, FVector)> = padded.iter().cloned().enumerate().collect();
                if search_embedding_with(Exec::Sequential, &pair.a_rebased, &stage, &partial)?
                    .is_some()
                {
                    continue;
                }
                let f_a = Embedding::new(b.clone(), stage.clone(), padded.clone());
                let f_c = Embedding::prefix_inclusion(b, &pair.a_rebased);
                let am = match opts.filler {
                    Filler::Zero => {
                        let zero = FVector::zeros(p, catalog.n);
                        amalgamate_with(&stage, &pair.a_rebased, b, &f_a, &f_c, &|_, _| {
                            zero.clone()
                        })?
                    }
                    Filler::Random => {
                        amalgamate_with(&stage, &pair.a_rebased, b, &f_a, &f_c, &|_, _| {
                            let mut rng = filler_rng.borrow_mut();
                            let w: Vec<i64> = (0..catalog.n)
                                .map(|_| rng.gen_range(0..p.get() as i64))
                                .collect();
                            FVector::from_ints(p, &w)
                        })?
                    }
                };
                if am.d.dim_v() > opts.stage_cap {
                    return Err(Error::TooLarge(format!(
                        "stage dimension {} exceeds the cap of {}",
                        am.d.dim_v(),
                        opts.stage_cap
                    )));
                }
                history.push(AmalgamationStep {
                    pair: pid,
                    base: padded,
                    extension: am.g_c.images,
                    dim_before: stage.dim_v(),
                    dim_after: am.d.dim_v(),
                });
                stage = am.d;
            }
        }
    }
    Ok(GenericApprox {
        sys: stage,
        history,
        seed,
        t,
        rounds,
        complete,
        catalog,
    })
}

/// Every embedding of `b` into `stage` in search order when there are at
/// most `budget` of them, otherwise `samples` seeded samples.
pub(crate) fn base_embeddings(
    b: &AltSystem,
    stage: &AltSystem,
    budget: u64,
    samples: u64,
    seed: u64,
    stream: u64,
) -> Result<(Vec<Vec<FVector>>, bool)> {
    let mut all = Vec::new();
    let mut overflow = false;
    for_each_embedding(b, stage, &[], |imgs| {
        if all.len() as u64 >= budget {
            overflow = true;
            return ControlFlow::Break(());
        }
        all.push(imgs.to_vec());
        ControlFlow::Continue(())
    })?;
    if !overflow {
        return Ok((all, true));
    }
    let mut rng = trial_rng(seed, stream);
    let mut sampled = Vec::new();
    for _ in 0..samples {
        if let Some(imgs) = sample_embedding(b, stage, &[], &mut rng, 8)? {
            sampled.push(imgs);
        }
    }
    Ok((sampled, false))
}
