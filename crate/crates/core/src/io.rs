//! Game files, report files and sweep CSV.
//!
//! Game file (`dcnc-game/1`, strict JSON; rationals as `"p/q"` strings or
//! integers, indices 0-based):
//!
//! ```json
//! {
//!   "schema": "dcnc-game/1",
//!   "name": "example2-l2 delta=2",
//!   "n": 2,
//!   "players": [
//!     {
//!       "owned": [0, 1],
//!       "objective": {
//!         "quad": [[0, 0, "4"], [0, 1, "-6"], [1, 1, "9"]],
//!         "lin": ["0", "0"],
//!         "constant": "0",
//!         "abs": [{ "weight": "1", "coeffs": ["2", "-3"], "constant": "0" }]
//!       },
//!       "ineq": [{ "coeffs": ["1"], "rhs": "1" }],
//!       "eq": [],
//!       "integral": [true],
//!       "upper": [null]
//!     }
//!   ]
//! }
//! ```
//!
//! `quad` lists entries of the symmetric matrix: `[i, j, v]` sets both
//! `Q[i][j]` and `Q[j][i]`. `owned` is the half-open range `[start, end)`.
//! `upper[i]` is either `null` (bound derived from the constraints) or a
//! declared bound that joins the inequality list. `abs` and `eq` may be
//! omitted.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::analysis::{classify, InclusionReport, SweepRow};
use crate::error::Error;
use crate::kkt::{
    build_kkt_system, Branch, ComplementarityPattern, KktCertificate, McpMembership, Multipliers,
    PlayerCertificate, PlayerKkt, RelaxedKktSystem,
};
use crate::model::{
    evaluate_objective, validate_game, AbsTerm, AffineForm, Constraint, GameSpec, ObjectiveSpec,
    PlayerSpec, StrategyProfile, ValidGame,
};
use crate::nash::{is_equilibrium, EquilibriumVerdict};
use crate::scalar::{render_tuple, serde_q, Scalar};

pub const GAME_SCHEMA: &str = "dcnc-game/1";
pub const REPORT_SCHEMA: &str = "dcnc-report/1";
pub const SWEEP_SCHEMA: &str = "dcnc-sweep/1";
pub const CHECK_SCHEMA: &str = "dcnc-check/1";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("schema error: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct QuadEntry<T>(pub usize, pub usize, #[serde(with = "serde_q")] pub T);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct AbsTermFile<T> {
    #[serde(with = "serde_q")]
    pub weight: T,
    #[serde(with = "serde_q::vec")]
    pub coeffs: Vec<T>,
    #[serde(with = "serde_q")]
    pub constant: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct ObjectiveFile<T> {
    pub quad: Vec<QuadEntry<T>>,
    #[serde(with = "serde_q::vec")]
    pub lin: Vec<T>,
    #[serde(with = "serde_q")]
    pub constant: T,
    #[serde(default)]
    pub abs: Vec<AbsTermFile<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct ConstraintFile<T> {
    #[serde(with = "serde_q::vec")]
    pub coeffs: Vec<T>,
    #[serde(with = "serde_q")]
    pub rhs: T,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct PlayerFile<T> {
    pub owned: [usize; 2],
    pub objective: ObjectiveFile<T>,
    pub ineq: Vec<ConstraintFile<T>>,
    #[serde(default)]
    pub eq: Vec<ConstraintFile<T>>,
    pub integral: Vec<bool>,
    #[serde(with = "serde_q::opt_vec")]
    pub upper: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct GameFile<T> {
    pub schema: String,
    pub name: String,
    pub n: usize,
    pub players: Vec<PlayerFile<T>>,
}

fn constraints_to_file<T: Scalar>(cs: &[Constraint<T>]) -> Vec<ConstraintFile<T>> {
    cs.iter()
        .map(|c| ConstraintFile {
            coeffs: c.coeffs.clone(),
            rhs: c.rhs.clone(),
        })
        .collect()
}

fn constraints_from_file<T: Scalar>(cs: Vec<ConstraintFile<T>>) -> Vec<Constraint<T>> {
    cs.into_iter()
        .map(|c| Constraint::new(c.coeffs, c.rhs))
        .collect()
}

impl<T: Scalar> GameFile<T> {
    pub fn from_spec(game: &GameSpec<T>) -> Self {
        let players = game
            .players
            .iter()
            .map(|p| {
                let obj = &p.objective;
                let mut quad = Vec::new();
                for (i, row) in obj.quad.iter().enumerate() {
                    for (j, v) in row.iter().enumerate().skip(i) {
                        if !v.is_zero() {
                            quad.push(QuadEntry(i, j, v.clone()));
                        }
                    }
                }
                PlayerFile {
                    owned: [p.owned.start, p.owned.end],
                    objective: ObjectiveFile {
                        quad,
                        lin: obj.lin.clone(),
                        constant: obj.constant.clone(),
                        abs: obj
                            .abs_terms
                            .iter()
                            .map(|t| AbsTermFile {
                                weight: t.weight.clone(),
                                coeffs: t.form.coeffs.clone(),
                                constant: t.form.constant.clone(),
                            })
                            .collect(),
                    },
                    ineq: constraints_to_file(&p.ineq),
                    eq: constraints_to_file(&p.eq),
                    integral: p.integral.clone(),
                    upper: p.upper.clone(),
                }
            })
            .collect();
        GameFile {
            schema: GAME_SCHEMA.to_string(),
            name: game.name.clone(),
            n: game.n,
            players,
        }
    }

    /// Structural conversion; semantic checks are left to validation.
    pub fn into_spec(self) -> Result<GameSpec<T>, IoError> {
        if self.schema != GAME_SCHEMA {
            return Err(IoError::Schema(format!(
                "unsupported schema `{}` (expected `{GAME_SCHEMA}`)",
                self.schema
            )));
        }
        let n = self.n;
        let mut players = Vec::with_capacity(self.players.len());
        for (idx, pf) in self.players.into_iter().enumerate() {
            let id = idx + 1;
            let [start, end] = pf.owned;
            if start > end {
                return Err(IoError::Schema(format!(
                    "players[{idx}].owned: start {start} exceeds end {end}"
                )));
            }
            let mut quad = vec![vec![T::zero(); n]; n];
            let mut seen = BTreeSet::new();
            for (e, QuadEntry(i, j, v)) in pf.objective.quad.into_iter().enumerate() {
                if i >= n || j >= n {
                    return Err(IoError::Schema(format!(
                        "players[{idx}].objective.quad[{e}]: index ({i},{j}) out of range for n = {n}"
                    )));
                }
                if !seen.insert((i.min(j), i.max(j))) {
                    return Err(IoError::Schema(format!(
                        "players[{idx}].objective.quad[{e}]: entry ({i},{j}) given twice"
                    )));
                }
                quad[i][j] = v.clone();
                quad[j][i] = v;
            }
            let abs_terms = pf
                .objective
                .abs
                .into_iter()
                .map(|a| AbsTerm {
                    weight: a.weight,
                    form: AffineForm {
                        coeffs: a.coeffs,
                        constant: a.constant,
                    },
                })
                .collect();
            players.push(PlayerSpec {
                id,
                owned: start..end,
                objective: ObjectiveSpec {
                    quad,
                    lin: pf.objective.lin,
                    constant: pf.objective.constant,
                    abs_terms,
                },
                ineq: constraints_from_file(pf.ineq),
                eq: constraints_from_file(pf.eq),
                integral: pf.integral,
                upper: pf.upper,
            });
        }
        Ok(GameSpec {
            name: self.name,
            n,
            players,
        })
    }
}

pub fn parse_game<T: Scalar>(text: &str) -> Result<GameSpec<T>, IoError> {
    let file: GameFile<T> = serde_json::from_str(text)?;
    file.into_spec()
}

pub fn render_game<T: Scalar>(game: &GameSpec<T>) -> String {
    let mut s = serde_json::to_string_pretty(&GameFile::from_spec(game)).expect("game serialises");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct ReportFile<T> {
    pub schema: String,
    pub game: GameFile<T>,
    pub report: InclusionReport<T>,
}

impl<T: Scalar> ReportFile<T> {
    pub fn new(game: &GameSpec<T>, report: InclusionReport<T>) -> Self {
        ReportFile {
            schema: REPORT_SCHEMA.to_string(),
            game: GameFile::from_spec(game),
            report,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct SweepEntry<T> {
    #[serde(with = "serde_q")]
    pub param: T,
    pub game: GameFile<T>,
    pub report: InclusionReport<T>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct SweepFile<T> {
    pub schema: String,
    pub case: String,
    pub parameter: String,
    pub rows: Vec<SweepEntry<T>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct SuppliedCheck<T> {
    pub certificate: KktCertificate<T>,
    pub violations: Vec<String>,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", deny_unknown_fields)]
pub struct CheckFile<T> {
    pub schema: String,
    pub game: GameFile<T>,
    pub profile: StrategyProfile<T>,
    pub equilibrium: EquilibriumVerdict<T>,
    pub membership: McpMembership<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supplied: Option<SuppliedCheck<T>>,
}

/// Multipliers supplied on the command line, flattened in player order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlatMultipliers<T> {
    pub lambda: Vec<T>,
    pub gamma: Vec<T>,
    pub t: Vec<T>,
    pub mu_plus: Vec<T>,
    pub mu_minus: Vec<T>,
}

/// Point check of a profile: equilibrium verdict, membership evidence, and
/// optionally a direct substitution test of user-supplied multipliers.
pub fn check_profile<T: Scalar>(
    game: &ValidGame<T>,
    profile: StrategyProfile<T>,
    supplied: Option<FlatMultipliers<T>>,
) -> Result<CheckFile<T>, IoError> {
    game.check_dimension(&profile)?;
    if let Some(v) = profile.x.iter().find(|v| !v.is_integral()) {
        return Err(IoError::Schema(format!(
            "profile entry {v} is not an integer"
        )));
    }
    let equilibrium = is_equilibrium(game, &profile)?;
    let system = build_kkt_system(game)?;
    let membership = system.membership(game, &profile)?;
    let supplied = match supplied {
        None => None,
        Some(flat) => {
            let certificate = split_multipliers(&system, &profile, flat)?;
            let violations = system.check_certificate(&certificate);
            Some(SuppliedCheck {
                verified: violations.is_empty(),
                certificate,
                violations,
            })
        }
    };
    Ok(CheckFile {
        schema: CHECK_SCHEMA.to_string(),
        game: GameFile::from_spec(game.spec()),
        profile,
        equilibrium,
        membership,
        supplied,
    })
}

fn split_multipliers<T: Scalar>(
    system: &RelaxedKktSystem<T>,
    profile: &StrategyProfile<T>,
    flat: FlatMultipliers<T>,
) -> Result<KktCertificate<T>, IoError> {
    let need = |f: fn(&PlayerKkt<T>) -> usize| system.players.iter().map(f).sum::<usize>();
    let checks = [
        ("lambda", flat.lambda.len(), need(|p| p.n_lambda())),
        ("gamma", flat.gamma.len(), need(|p| p.n_gamma())),
        ("t", flat.t.len(), need(|p| p.n_epigraph())),
        ("mu+", flat.mu_plus.len(), need(|p| p.n_epigraph())),
        ("mu-", flat.mu_minus.len(), need(|p| p.n_epigraph())),
    ];
    for (what, found, expected) in checks {
        if found != expected {
            return Err(Error::DimensionMismatch {
                what: format!("{what} multipliers"),
                expected,
                found,
            }
            .into());
        }
    }
    let mut iters = (
        flat.lambda.into_iter(),
        flat.gamma.into_iter(),
        flat.t.into_iter(),
        flat.mu_plus.into_iter(),
        flat.mu_minus.into_iter(),
    );
    let players = system
        .players
        .iter()
        .map(|pk| {
            let ne = pk.n_epigraph();
            let multipliers = Multipliers {
                lambda: iters.0.by_ref().take(pk.n_lambda()).collect(),
                gamma: iters.1.by_ref().take(pk.n_gamma()).collect(),
                t: iters.2.by_ref().take(ne).collect(),
                mu_plus: iters.3.by_ref().take(ne).collect(),
                mu_minus: iters.4.by_ref().take(ne).collect(),
            };
            let (stationarity, constraints) = pk.fixed_branches(&profile.x)?;
            let side = |mu: &[T]| {
                mu.iter()
                    .map(|m| {
                        if m.is_positive() {
                            Branch::Active
                        } else {
                            Branch::Inactive
                        }
                    })
                    .collect()
            };
            let pattern = ComplementarityPattern {
                stationarity,
                constraints,
                epigraph_upper: side(&multipliers.mu_plus),
                epigraph_lower: side(&multipliers.mu_minus),
            };
            Ok(PlayerCertificate {
                player: pk.player,
                multipliers,
                pattern,
            })
        })
        .collect::<Result<_, Error>>()?;
    Ok(KktCertificate {
        profile: profile.clone(),
        players,
    })
}

pub fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

/// Outcome of re-checking every piece of evidence in a report.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Audit {
    pub equilibria_checked: usize,
    pub certificates_checked: usize,
    pub refutations_checked: usize,
    pub failures: Vec<String>,
}

impl Audit {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(&mut self, other: Audit) {
        self.equilibria_checked += other.equilibria_checked;
        self.certificates_checked += other.certificates_checked;
        self.refutations_checked += other.refutations_checked;
        self.failures.extend(other.failures);
    }
}

/// Re-verifies an inclusion report against its game from scratch: every
/// listed equilibrium, every KKT certificate by substitution, every
/// refutation by rebuilding its pattern systems, and the stated relation.
pub fn audit_report<T: Scalar>(
    game: &ValidGame<T>,
    report: &InclusionReport<T>,
) -> Result<Audit, Error> {
    let system = build_kkt_system(game)?;
    let mut audit = Audit::default();
    for x in &report.nash.profiles {
        audit.equilibria_checked += 1;
        match is_equilibrium(game, x) {
            Ok(v) if v.is_equilibrium() => {}
            _ => audit
                .failures
                .push(format!("listed equilibrium {x} does not verify")),
        }
    }
    let certified: Vec<&StrategyProfile<T>> =
        report.certificates.iter().map(|c| &c.profile).collect();
    let listed: Vec<&StrategyProfile<T>> = report.mcp.profiles.iter().collect();
    if certified != listed {
        audit
            .failures
            .push("certificates do not match the complementarity set".into());
    }
    for c in &report.certificates {
        audit.certificates_checked += 1;
        if !system.verify_certificate(c) {
            audit
                .failures
                .push(format!("KKT certificate for {} does not verify", c.profile));
        }
    }
    for w in &report.witnesses {
        audit.refutations_checked += 1;
        if w.refutation.profile != w.profile || !system.verify_refutation(&w.refutation, u64::MAX) {
            audit
                .failures
                .push(format!("refutation for {} does not verify", w.profile));
        }
    }
    let missed: Vec<&StrategyProfile<T>> = report
        .nash
        .profiles
        .iter()
        .filter(|x| !report.mcp.contains(x))
        .collect();
    let witnessed: Vec<&StrategyProfile<T>> = report.witnesses.iter().map(|w| &w.profile).collect();
    if missed != witnessed {
        audit
            .failures
            .push("witness list does not cover the missed equilibria".into());
    }
    if classify(&report.nash, &report.mcp) != Some(report.relation) {
        audit.failures.push(format!(
            "stated relation {} does not match the sets",
            report.relation
        ));
    }
    Ok(audit)
}

/// Audits a report file, using `game` when given and the embedded game otherwise.
pub fn audit_report_file<T: Scalar>(
    file: &ReportFile<T>,
    game: Option<GameSpec<T>>,
) -> Result<Audit, IoError> {
    let spec = match game {
        Some(g) => g,
        None => file.game.clone().into_spec()?,
    };
    let valid = validate_game(spec)?;
    Ok(audit_report(&valid, &file.report)?)
}

pub fn audit_sweep_file<T: Scalar>(file: &SweepFile<T>) -> Result<Audit, IoError> {
    let mut audit = Audit::default();
    for row in &file.rows {
        let valid = validate_game(row.game.clone().into_spec()?)?;
        audit.merge(audit_report(&valid, &row.report)?);
    }
    Ok(audit)
}

pub fn audit_check_file<T: Scalar>(file: &CheckFile<T>) -> Result<Audit, IoError> {
    let valid = validate_game(file.game.clone().into_spec()?)?;
    let system = build_kkt_system(&valid)?;
    let mut audit = Audit::default();
    match &file.equilibrium {
        EquilibriumVerdict::Equilibrium => {
            audit.equilibria_checked += 1;
            if !is_equilibrium(&valid, &file.profile)?.is_equilibrium() {
                audit
                    .failures
                    .push("equilibrium verdict does not verify".into());
            }
        }
        EquilibriumVerdict::Deviation(w) => {
            if !w.verify(&valid) {
                audit
                    .failures
                    .push("deviation witness does not verify".into());
            }
        }
    }
    match &file.membership {
        McpMembership::Member(_) => audit.certificates_checked += 1,
        McpMembership::NonMember(_) => audit.refutations_checked += 1,
    }
    if !system.verify_membership(&file.membership, u64::MAX) {
        audit
            .failures
            .push("membership evidence does not verify".into());
    }
    Ok(audit)
}

/// Any of the three output files, told apart by their `schema` field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OutputFile<T> {
    Report(ReportFile<T>),
    Sweep(SweepFile<T>),
    Check(CheckFile<T>),
}

pub fn parse_output_file<T: Scalar>(text: &str) -> Result<OutputFile<T>, IoError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let schema = value
        .get("schema")
        .and_then(|s| s.as_str())
        .unwrap_or_default();
    match schema {
        REPORT_SCHEMA => Ok(OutputFile::Report(serde_json::from_str(text)?)),
        SWEEP_SCHEMA => Ok(OutputFile::Sweep(serde_json::from_str(text)?)),
        CHECK_SCHEMA => Ok(OutputFile::Check(serde_json::from_str(text)?)),
        other => Err(IoError::Schema(format!(
            "unrecognised output schema `{other}`"
        ))),
    }
}

pub fn audit_output_file<T: Scalar>(
    file: &OutputFile<T>,
    game: Option<GameSpec<T>>,
) -> Result<Audit, IoError> {
    match file {
        OutputFile::Report(r) => audit_report_file(r, game),
        OutputFile::Sweep(s) => audit_sweep_file(s),
        OutputFile::Check(c) => audit_check_file(c),
    }
}

pub fn sweep_file<T: Scalar>(
    case: crate::analysis::Case,
    rows: Vec<SweepRow<T>>,
) -> Result<SweepFile<T>, Error> {
    let rows = rows
        .into_iter()
        .map(|row| {
            let game = case.game(row.param.clone())?;
            Ok(SweepEntry {
                param: row.param,
                game: GameFile::from_spec(&game),
                report: row.report,
            })
        })
        .collect::<Result<_, Error>>()?;
    Ok(SweepFile {
        schema: SWEEP_SCHEMA.to_string(),
        case: case.to_string(),
        parameter: case.param_name().to_string(),
        rows,
    })
}

pub const CSV_HEADER: [&str; 4] = ["param", "nash_set", "mcp_set", "relation"];

pub fn write_sweep_csv<T: Scalar, W: Write>(rows: &[SweepRow<T>], out: W) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record([
            row.param.to_string(),
            row.nash().render(),
            row.mcp().render(),
            row.relation().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Cost table for two players with one variable each, laid out as
/// `(f1, f2)` cells with player 1 on the rows.
pub fn payoff_table<T: Scalar>(game: &ValidGame<T>) -> Option<String> {
    let players = game.players();
    if players.len() != 2 || players.iter().any(|p| p.n_own() != 1) {
        return None;
    }
    let rows = crate::model::enumerate_feasible_lattice(game, 0).ok()?;
    let cols = crate::model::enumerate_feasible_lattice(game, 1).ok()?;
    if rows.is_empty() || cols.is_empty() {
        return None;
    }
    let (v1, v2) = (players[0].owned.start + 1, players[1].owned.start + 1);
    let mut cells = vec![vec![String::new(); cols.len() + 1]; rows.len() + 1];
    for (c, col) in cols.iter().enumerate() {
        cells[0][c + 1] = format!("x{v2} = {}", col[0]);
    }
    for (r, row) in rows.iter().enumerate() {
        cells[r + 1][0] = format!("x{v1} = {}", row[0]);
        for (c, col) in cols.iter().enumerate() {
            let mut x = vec![T::zero(); game.n()];
            x[players[0].owned.start] = row[0].clone();
            x[players[1].owned.start] = col[0].clone();
            let x = StrategyProfile::new(x);
            let f1 = evaluate_objective(game, 0, &x).ok()?;
            let f2 = evaluate_objective(game, 1, &x).ok()?;
            cells[r + 1][c + 1] = format!("({f1}, {f2})");
        }
    }
    let widths: Vec<usize> = (0..=cols.len())
        .map(|c| {
            cells
                .iter()
                .map(|r| r[c].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for (r, line) in cells.iter().enumerate() {
        let padded: Vec<String> = line
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        let _ = writeln!(out, "  {}", padded.join(" | ").trim_end());
        if r == 0 {
            let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
            let _ = writeln!(out, "  {}", rule.join("-+-"));
        }
    }
    Some(out)
}

pub fn render_report_text<T: Scalar>(game: &ValidGame<T>, report: &InclusionReport<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "game: {}", report.descriptor);
    if let Some(table) = payoff_table(game) {
        let _ = writeln!(out, "costs (f1, f2):");
        out.push_str(&table);
    }
    let _ = writeln!(out, "S_nash = {}", report.nash.render());
    let _ = writeln!(out, "S_mcp  = {}", report.mcp.render());
    let _ = writeln!(out, "relation: {}", report.relation);
    for w in &report.witnesses {
        let _ = writeln!(out, "equilibrium {} admits no KKT multipliers:", w.profile);
        for pr in &w.refutation.players {
            for (i, case) in pr.cases.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  player {} pattern {}: {}  [Farkas: eq {} ineq {}]",
                    pr.player,
                    i + 1,
                    case.system.join("; "),
                    render_tuple(&case.certificate.eq_multipliers),
                    render_tuple(&case.certificate.ineq_multipliers)
                );
            }
        }
    }
    for note in &report.global_optima {
        let mins: Vec<String> = note.minimizers.iter().map(ToString::to_string).collect();
        let _ = write!(
            out,
            "player {} global minimum {} at {}",
            note.player,
            note.value,
            mins.join(", ")
        );
        if note.is_missed() {
            let missed: Vec<String> = note.missed.iter().map(ToString::to_string).collect();
            let _ = write!(
                out,
                "  (equilibrium missed by complementarity: {})",
                missed.join(", ")
            );
        }
        out.push('\n');
    }
    out
}

pub fn render_check_text<T: Scalar>(check: &CheckFile<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "profile: {}", check.profile);
    match &check.equilibrium {
        EquilibriumVerdict::Equilibrium => {
            let _ = writeln!(out, "equilibrium: yes");
        }
        EquilibriumVerdict::Deviation(w) => {
            let _ = writeln!(
                out,
                "equilibrium: no (player {} deviates to {} and gains {})",
                w.player,
                render_tuple(&w.to),
                w.improvement
            );
        }
    }
    match &check.membership {
        McpMembership::Member(c) => {
            let _ = writeln!(out, "MCP member: yes");
            for pc in &c.players {
                let _ = writeln!(
                    out,
                    "  player {}: lambda = {}",
                    pc.player,
                    render_tuple(&pc.multipliers.lambda)
                );
            }
        }
        McpMembership::NonMember(r) => {
            let _ = writeln!(out, "MCP member: no");
            for pr in &r.players {
                for case in &pr.cases {
                    let _ = writeln!(out, "  player {}: {}", pr.player, case.system.join("; "));
                }
            }
        }
    }
    if let Some(s) = &check.supplied {
        if s.verified {
            let _ = writeln!(out, "supplied multipliers: verified");
        } else {
            let _ = writeln!(out, "supplied multipliers: FAILED");
            for v in &s.violations {
                let _ = writeln!(out, "  {v}");
            }
        }
    }
    out
}
