//! The end-to-end reconstruction experiment: a model space, a nearby
//! approximation glued to it, matched covers on both sides, and the chain
//! of checks connecting the model's homology to the selective Rips
//! complex of the approximation.
//!
//! Four links are verified:
//! (i)   the model's reference Betti numbers equal those of the nerve of
//!       its ball cover;
//! (ii)  the nerve is unchanged when the cover is traced on the
//!       approximation side of the union;
//! (iii) complexes of trace intersections equal intersections of trace
//!       complexes (the vertex-intrinsic identity);
//! (iv)  the traced cover is good (every intersection crushable or at
//!       least homologically trivial) and the approximation's complex has
//!       the reference Betti numbers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::glue::{GlueError, PseudoMetricUnion};
use crate::homology::betti;
use crate::metric::FiniteMetricSpace;
use crate::nerve::{
    build_cover, build_right_cover, good_cover_check, intersection_hausdorff, mu_margin,
    nerve_complex, nerve_iso_check, IntersectionVerdict, NerveError,
};
use crate::scalar::Scalar;
use crate::scales::ScaleSequence;
use crate::srips::build_complex;

#[derive(Debug, Error)]
pub enum ReconstructError {
    #[error("cover radius alpha sits exactly on a critical radius; nudge it")]
    AlphaOnCriticalRadius,
    #[error("model cover is not covering")]
    ModelCoverIncomplete,
    #[error(transparent)]
    Nerve(#[from] NerveError),
    #[error(transparent)]
    Glue(#[from] GlueError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructConfig<S> {
    pub centers: Vec<usize>,
    pub alpha: S,
    pub scales: ScaleSequence<S>,
    pub dim_cap: usize,
    pub size_cap: usize,
    /// Betti numbers the model is known to have (the reference shape).
    pub reference_betti: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinkReport {
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReconstructReport<S> {
    pub gh_upper_bound: S,
    pub proximity_budget: S,
    pub mu: S,
    pub nerve_counts: Vec<usize>,
    pub approx_betti: Vec<usize>,
    pub link_nerve_matches_model: LinkReport,
    pub link_nerves_isomorphic: LinkReport,
    pub link_intersection_identity: LinkReport,
    pub link_good_cover_and_betti: LinkReport,
    pub all_pass: bool,
}

/// Proximity budget min{δ'₂-style intersection bound, α/8, μ/2}. The
/// intersection term is monitored a posteriori through
/// `intersection_hausdorff`, so the budget here is the geometric part;
/// callers keep the glue bound below it and the report records both.
pub fn proximity_budget<S: Scalar>(alpha: S, mu: S) -> S {
    (alpha / S::lit(8.0)).min(mu / S::lit(2.0))
}

/// Runs the four-link experiment on a model, an approximation, and their
/// union.
pub fn run_reconstruction<S: Scalar>(
    model: &FiniteMetricSpace<S>,
    union: &PseudoMetricUnion<S>,
    config: &ReconstructConfig<S>,
) -> Result<ReconstructReport<S>, ReconstructError> {
    let cover = build_cover(model, &config.centers, config.alpha)?;
    if !cover.covering {
        return Err(ReconstructError::ModelCoverIncomplete);
    }
    let mu = mu_margin(model, &config.centers, config.alpha, config.size_cap)
        .ok_or(ReconstructError::AlphaOnCriticalRadius)?;
    let budget = proximity_budget(config.alpha, mu);
    let gh = union.gh_upper_bound();

    // (i) model nerve has the reference homology.
    let nerve = nerve_complex(&cover, config.size_cap);
    let nerve_betti = betti(&nerve, config.reference_betti.len() - 1);
    let link_i = LinkReport {
        pass: nerve_betti == config.reference_betti,
        detail: format!(
            "nerve betti {:?} vs reference {:?}",
            nerve_betti, config.reference_betti
        ),
    };

    // (ii) the traced cover has the same nerve.
    let traced = build_right_cover(union, &config.centers, config.alpha)?;
    let iso = nerve_iso_check(&cover, &traced, config.size_cap)?;
    let inter = intersection_hausdorff(union, &config.centers, config.alpha, config.size_cap);
    let link_ii = LinkReport {
        pass: iso.isomorphic && inter.mismatches.is_empty(),
        detail: match (&iso.first_mismatch, inter.mismatches.first()) {
            (None, None) => format!(
                "nerves identical; max intersection Hausdorff {:?}",
                inter.max_hausdorff.map(|h| h.as_f64())
            ),
            (Some(m), _) => format!("nerve mismatch at {m:?}"),
            (None, Some(m)) => format!("one-sided empty intersection at {m:?}"),
        },
    };

    // (iii) + (iv) good cover of the approximation side.
    let good = good_cover_check(
        &union.right,
        &traced,
        &config.scales,
        config.dim_cap,
        config.size_cap,
    );
    let identity_ok = good.checks.iter().all(|c| c.intersection_identity);
    let link_iii = LinkReport {
        pass: identity_ok,
        detail: if identity_ok {
            format!("{} intersections verified", good.checks.len())
        } else {
            let bad = good
                .checks
                .iter()
                .find(|c| !c.intersection_identity)
                .unwrap();
            format!("identity fails at {:?}", bad.sigma)
        },
    };

    let approx_complex = build_complex(&union.right, &config.scales, config.dim_cap);
    let approx_betti = betti(&approx_complex, config.reference_betti.len() - 1);
    let suspects: Vec<_> = good
        .checks
        .iter()
        .filter(|c| c.verdict == IntersectionVerdict::Suspect)
        .collect();
    let betti_ok = approx_betti == config.reference_betti;
    let link_iv = LinkReport {
        pass: suspects.is_empty() && betti_ok,
        detail: if let Some(bad) = suspects.first() {
            format!("suspect intersection {:?} (betti {:?})", bad.sigma, bad.betti)
        } else {
            format!(
                "cover good; approximation betti {:?} vs reference {:?}",
                approx_betti, config.reference_betti
            )
        },
    };

    let all_pass = link_i.pass && link_ii.pass && link_iii.pass && link_iv.pass;
    Ok(ReconstructReport {
        gh_upper_bound: gh,
        proximity_budget: budget,
        mu,
        nerve_counts: nerve.counts(),
        approx_betti,
        link_nerve_matches_model: link_i,
        link_nerves_isomorphic: link_ii,
        link_intersection_identity: link_iii,
        link_good_cover_and_betti: link_iv,
        all_pass,
    })
}
