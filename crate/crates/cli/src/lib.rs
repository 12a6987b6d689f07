//! Command implementations behind the `bestworst` binary: certify a
//! profile, construct an equilibrium family member, sweep the negative
//! weight to tabulate dispersion, and cross-check the exact engine with
//! the sampled-voter oracle.
//!
//! Rationals cross this boundary as `"num/den"` strings everywhere; no
//! float ever enters a certificate.

use anyhow::{anyhow, Context};
use num::{ToPrimitive, Zero};
use serde::Serialize;

use bestworst::{
    classify, cne_interval, grid_best_deviation, ncne_family, ncne_m4, ncne_m5,
    ncne_max_dispersed, ncne_min_dispersed, parse_rat, sample_scores_sharded, score_all,
    EquilibriumCertificate, Error, Instance, NcneConfig, Profile, Rat, Rule, Violation, Witness,
};

/// Equilibrium families the construction commands know how to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[clap(rename_all = "snake_case")]
pub enum Family {
    /// Convergent equilibrium at the median (requires `c >= 1`, or `m = 2`).
    Cne,
    /// The unique divergent equilibrium for four candidates.
    M4,
    /// The unique divergent equilibrium for five candidates.
    M5,
    /// Equal half-electorate layout: the most dispersed equilibrium.
    MaxDispersed,
    /// The least dispersed layout for the rule's candidate count.
    MinDispersed,
    /// Member of the dispersion family for `m >= 6`, selected by epsilon.
    Family,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cne => "cne",
            Family::M4 => "m4",
            Family::M5 => "m5",
            Family::MaxDispersed => "max_dispersed",
            Family::MinDispersed => "min_dispersed",
            Family::Family => "family",
        }
    }
}

/// A constructed profile plus the layout quantities the CLI reports.
pub struct Built {
    pub profile: Profile,
    pub x1: Rat,
    pub half_unit: Option<Rat>,
    pub epsilon_max: Option<Rat>,
    pub convergent_limit: bool,
}

/// Builds the requested family member for a rule.
pub fn construct_profile(
    rule: &Rule,
    family: Family,
    epsilon: Option<&Rat>,
    q: Option<usize>,
) -> Result<Built, Error> {
    match family {
        Family::Cne => {
            let interval =
                cne_interval(rule).ok_or_else(|| Error::WrongRegime(rule.c().to_string()))?;
            let x1 = (interval.lo() + interval.hi()) * bestworst::rat(1, 2);
            let profile = Profile::new(vec![x1.clone(); rule.m()])?;
            Ok(Built {
                profile,
                x1,
                half_unit: None,
                epsilon_max: None,
                convergent_limit: false,
            })
        }
        Family::M4 => ncne_m4(rule).map(Built::from),
        Family::M5 => ncne_m5(rule).map(Built::from),
        Family::MaxDispersed => {
            let q = q.unwrap_or_else(|| rule.m().saturating_sub(2));
            let config = NcneConfig::equal_spacing(rule.m(), q)?;
            ncne_max_dispersed(rule, &config).map(Built::from)
        }
        Family::MinDispersed => ncne_min_dispersed(rule).map(Built::from),
        Family::Family => {
            let zero = Rat::zero();
            ncne_family(rule, epsilon.unwrap_or(&zero)).map(Built::from)
        }
    }
}

impl From<bestworst::Constructed> for Built {
    fn from(c: bestworst::Constructed) -> Self {
        Built {
            profile: c.profile,
            x1: c.x1,
            half_unit: Some(c.half_unit),
            epsilon_max: c.epsilon_max,
            convergent_limit: c.convergent_limit,
        }
    }
}

#[derive(Serialize)]
pub struct CertificateDoc {
    pub verdict: String,
    pub q: usize,
    pub per_candidate: Vec<CandidateDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cne: Option<CneDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conditions: Option<ConditionsDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violated_by: Option<ViolationDoc>,
}

#[derive(Serialize)]
pub struct CandidateDoc {
    pub candidate: usize,
    pub score: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_deviation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub attained: Option<bool>,
}

#[derive(Serialize)]
pub struct WitnessDoc {
    pub kind: &'static str,
    pub at: String,
}

#[derive(Serialize)]
pub struct CneDoc {
    /// `null` when no convergent equilibrium exists for the rule.
    pub interval: Option<IntervalDoc>,
    pub member: bool,
}

#[derive(Serialize)]
pub struct IntervalDoc {
    pub lo: String,
    pub hi: String,
}

#[derive(Serialize)]
pub struct ConditionsDoc {
    pub ends_paired: bool,
    pub equal_paired_halves: bool,
    pub end_margin: bool,
    pub unpaired_full_dominates: bool,
    pub paired_half_dominates: bool,
    pub common_half: String,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationDoc {
    Deviation { candidate: usize, payoff: String },
    Condition { name: String },
    IntervalMembership,
}

pub fn certificate_doc(cert: &EquilibriumCertificate) -> CertificateDoc {
    let per_candidate = cert
        .per_candidate
        .iter()
        .map(|c| CandidateDoc {
            candidate: c.candidate,
            score: c.score.to_string(),
            best_deviation: c.sup_deviation.as_ref().map(Rat::to_string),
            slack: c.slack.as_ref().map(Rat::to_string),
            witness: c.witness.as_ref().map(|w| match w {
                Witness::Point(t) => WitnessDoc {
                    kind: "point",
                    at: t.to_string(),
                },
                Witness::LeftLimitAt(x) => WitnessDoc {
                    kind: "left_limit",
                    at: x.to_string(),
                },
                Witness::RightLimitAt(x) => WitnessDoc {
                    kind: "right_limit",
                    at: x.to_string(),
                },
            }),
            attained: c.attained,
        })
        .collect();
    CertificateDoc {
        verdict: cert.verdict.as_str().to_string(),
        q: cert.q,
        per_candidate,
        cne: cert.cne.as_ref().map(|r| CneDoc {
            interval: r.interval.as_ref().map(|iv| IntervalDoc {
                lo: iv.lo().to_string(),
                hi: iv.hi().to_string(),
            }),
            member: r.member,
        }),
        conditions: cert.conditions.as_ref().map(|r| ConditionsDoc {
            ends_paired: r.ends_paired,
            equal_paired_halves: r.equal_paired_halves,
            end_margin: r.end_margin,
            unpaired_full_dominates: r.unpaired_full_dominates,
            paired_half_dominates: r.paired_half_dominates,
            common_half: r.common_half.to_string(),
        }),
        violated_by: cert.violated_by.as_ref().map(|v| match v {
            Violation::Deviation { candidate, payoff } => ViolationDoc::Deviation {
                candidate: *candidate,
                payoff: payoff.to_string(),
            },
            Violation::Condition { name } => ViolationDoc::Condition {
                name: (*name).to_string(),
            },
            Violation::IntervalMembership => ViolationDoc::IntervalMembership,
        }),
    }
}

/// Certifies a JSON profile document. Returns the certificate JSON and the
/// process exit code: 0 for an equilibrium, 1 otherwise.
pub fn run_check(input: &str) -> anyhow::Result<(String, u8)> {
    let instance: Instance =
        serde_json::from_str(input).context("cannot parse the profile document")?;
    let cert = classify(&instance.rule, &instance.profile)?;
    let json = serde_json::to_string_pretty(&certificate_doc(&cert))?;
    let exit = if cert.verdict.is_equilibrium() { 0 } else { 1 };
    Ok((json, exit))
}

#[derive(Serialize)]
struct ConstructDoc {
    c: String,
    m: usize,
    family: &'static str,
    positions: Vec<String>,
    x1: String,
    #[serde(rename = "Ip", skip_serializing_if = "Option::is_none")]
    ip: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    epsilon_max: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<String>,
    certificate: CertificateDoc,
}

/// Builds a family member and re-certifies it. The output document embeds
/// the `c`/`m`/`positions` fields, so it feeds straight back into `check`.
pub fn run_construct(
    c: &str,
    m: usize,
    family: Family,
    epsilon: Option<&str>,
    q: Option<usize>,
) -> anyhow::Result<String> {
    let rule = Rule::new(parse_rat(c)?, m)?;
    let epsilon = epsilon.map(parse_rat).transpose()?;
    let built = construct_profile(&rule, family, epsilon.as_ref(), q)?;
    let cert = classify(&rule, &built.profile)?;
    let doc = ConstructDoc {
        c: rule.c().to_string(),
        m,
        family: family.name(),
        positions: built
            .profile
            .positions()
            .iter()
            .map(Rat::to_string)
            .collect(),
        x1: built.x1.to_string(),
        ip: built.half_unit.as_ref().map(Rat::to_string),
        epsilon_max: built.epsilon_max.as_ref().map(Rat::to_string),
        note: built
            .convergent_limit
            .then(|| "limit, not NCNE: platforms merge at the median when c = 1".to_string()),
        certificate: certificate_doc(&cert),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// One `c` value per row, tabulating a family across the weight range.
/// Construction or certification failures land in the row's error column
/// instead of aborting the sweep.
pub fn run_sweep(
    m: usize,
    family: Family,
    c_list: &[String],
    epsilon: Option<&str>,
    q: Option<usize>,
) -> anyhow::Result<String> {
    if c_list.is_empty() {
        return Err(anyhow!("need at least one weight in --c-list"));
    }
    let epsilon = epsilon.map(parse_rat).transpose()?;
    let mut csv = String::from("c,m,family,verdict,x1,Ip,positions,error\n");
    for c_str in c_list {
        let row = sweep_row(c_str, m, family, epsilon.as_ref(), q);
        let (verdict, x1, ip, positions, error) = match row {
            Ok((cert, built)) => (
                cert.verdict.as_str().to_string(),
                built.x1.to_string(),
                built
                    .half_unit
                    .as_ref()
                    .map(Rat::to_string)
                    .unwrap_or_default(),
                built
                    .profile
                    .positions()
                    .iter()
                    .map(Rat::to_string)
                    .collect::<Vec<_>>()
                    .join(";"),
                String::new(),
            ),
            Err(err) => (
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                err.to_string().replace(',', ";"),
            ),
        };
        csv.push_str(&format!(
            "{c_str},{m},{family},{verdict},{x1},{ip},{positions},{error}\n",
            family = family.name()
        ));
    }
    Ok(csv)
}

fn sweep_row(
    c_str: &str,
    m: usize,
    family: Family,
    epsilon: Option<&Rat>,
    q: Option<usize>,
) -> Result<(EquilibriumCertificate, Built), Error> {
    let rule = Rule::new(parse_rat(c_str)?, m)?;
    let built = construct_profile(&rule, family, epsilon, q)?;
    // Never trust the constructor's intent: recompute the verdict.
    let cert = classify(&rule, &built.profile)?;
    Ok((cert, built))
}

#[derive(Serialize)]
struct McDoc {
    n_voters: u64,
    seed: u64,
    max_abs_z: f64,
    per_candidate: Vec<McCandidateDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<Vec<GridDoc>>,
}

#[derive(Serialize)]
struct McCandidateDoc {
    candidate: usize,
    exact: String,
    exact_float: f64,
    mc_mean: f64,
    stderr: f64,
    z: f64,
}

#[derive(Serialize)]
struct GridDoc {
    candidate: usize,
    max: String,
    argmax: String,
    beats_score: bool,
}

/// Samples `n` voters and compares the estimate with the exact engine.
/// Exit code 1 when any candidate's z-score exceeds 4 in magnitude.
pub fn run_mc(
    input: &str,
    n: u64,
    seed: u64,
    grid_step: Option<&str>,
) -> anyhow::Result<(String, u8)> {
    let instance: Instance =
        serde_json::from_str(input).context("cannot parse the profile document")?;
    let rule = &instance.rule;
    let profile = &instance.profile;
    let exact = score_all(rule, profile)?;
    let shards = std::thread::available_parallelism().map_or(1, |p| p.get().min(16));
    let est = sample_scores_sharded(rule, profile, n, seed, shards)?;
    let mut max_abs_z = 0.0f64;
    let per_candidate = (0..profile.len())
        .map(|i| {
            let exact_float = exact.per_candidate[i].to_f64().unwrap_or(f64::NAN);
            let diff = est.per_candidate_mean[i] - exact_float;
            let z = if diff == 0.0 {
                0.0
            } else if est.per_candidate_stderr[i] > 0.0 {
                diff / est.per_candidate_stderr[i]
            } else {
                f64::INFINITY
            };
            max_abs_z = max_abs_z.max(z.abs());
            McCandidateDoc {
                candidate: i,
                exact: exact.per_candidate[i].to_string(),
                exact_float,
                mc_mean: est.per_candidate_mean[i],
                stderr: est.per_candidate_stderr[i],
                z,
            }
        })
        .collect();
    let grid = grid_step
        .map(|step| -> anyhow::Result<Vec<GridDoc>> {
            let step = parse_rat(step)?;
            (0..profile.len())
                .map(|i| {
                    let (max, argmax) = grid_best_deviation(rule, profile, i, &step)?;
                    Ok(GridDoc {
                        beats_score: max > exact.per_candidate[i],
                        max: max.to_string(),
                        argmax: argmax.to_string(),
                        candidate: i,
                    })
                })
                .collect()
        })
        .transpose()?;
    let doc = McDoc {
        n_voters: n,
        seed,
        max_abs_z,
        per_candidate,
        grid,
    };
    let json = serde_json::to_string_pretty(&doc)?;
    Ok((json, if max_abs_z > 4.0 { 1 } else { 0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn check_reports_the_verdict_and_exit_code() {
        let (json, exit) =
            run_check(r#"{"c":"1/2","m":4,"positions":["3/8","3/8","5/8","5/8"]}"#).unwrap();
        assert_eq!(exit, 0);
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["verdict"], "NCNE");
        assert_eq!(doc["conditions"]["common_half"], "1/8");

        let (_, exit) =
            run_check(r#"{"c":"1/2","m":4,"positions":["1/4","1/4","3/4","3/4"]}"#).unwrap();
        assert_eq!(exit, 1);

        assert!(run_check("not json").is_err());
        assert!(run_check(r#"{"c":"1/2","m":4,"positions":["1/2"]}"#).is_err());
    }

    #[test]
    fn construct_embeds_a_checkable_document() {
        let json = run_construct("0", 6, Family::MaxDispersed, None, None).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["x1"], "1/8");
        assert_eq!(doc["certificate"]["verdict"], "NCNE");
        // The document itself re-parses as a profile instance.
        let (_, exit) = run_check(&json).unwrap();
        assert_eq!(exit, 0);
    }

    #[test]
    fn construct_flags_the_merged_limit() {
        let json = run_construct("1", 6, Family::MaxDispersed, None, None).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(doc["note"].as_str().unwrap().contains("limit"));
        assert_eq!(doc["certificate"]["verdict"], "CNE");
        assert!(doc["positions"]
            .as_array()
            .unwrap()
            .iter()
            .all(|p| p == "1/2"));
    }

    #[test]
    fn construct_surfaces_the_feasible_range() {
        let err = run_construct("0", 6, Family::Family, Some("1/16"), None).unwrap_err();
        assert!(err.to_string().contains("1/24"), "{err}");
    }

    #[test]
    fn sweep_emits_exact_rows_and_isolated_errors() {
        let csv = run_sweep(
            6,
            Family::MaxDispersed,
            &["0".into(), "1/4".into(), "3/2".into()],
            None,
            None,
        )
        .unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "c,m,family,verdict,x1,Ip,positions,error");
        assert!(lines[1].starts_with("0,6,max_dispersed,NCNE,1/8,1/8,"));
        assert!(lines[2].starts_with("1/4,6,max_dispersed,NCNE,7/32,3/32,"));
        // c = 3/2 cannot host the divergent family: error column only.
        assert!(lines[3].starts_with("3/2,6,max_dispersed,,,,,"));
        assert!(lines[3].contains("regime"));
    }

    #[test]
    fn mc_cross_checks_the_exact_engine() {
        let (json, exit) = run_mc(
            r#"{"c":"1/2","m":4,"positions":["3/8","3/8","5/8","5/8"]}"#,
            20_000,
            7,
            Some("1/100"),
        )
        .unwrap();
        assert_eq!(exit, 0);
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(doc["max_abs_z"].as_f64().unwrap() <= 4.0);
        let grid = doc["grid"].as_array().unwrap();
        assert_eq!(grid.len(), 4);
        for g in grid {
            assert_eq!(g["beats_score"], false);
        }
    }
}
