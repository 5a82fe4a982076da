//! Phase selection.
//!
//! The dynamic rule probes both polarities of a decision variable with the
//! solver's own BCP and keeps the polarity whose implied literals carry more
//! static weight. Seven schemes combine that rule with classic phase saving,
//! and two schedulers pick one scheme per search period (the stretch of
//! search between two restarts).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::cnf::{Lit, Var};
use crate::engine::ClauseRef;
use crate::weights::StaticWeightTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Saved phase, else false. Saves only the deepest level on backjump.
    FSave,
    /// Saved phase, else true. Saves only the deepest level on backjump.
    TSave,
    /// Saved phase, else false. Saves every unassigned variable.
    FAllSave,
    /// Dynamic probe on decision levels whose parity matches the period's,
    /// `FSave` on the others.
    OddEvenDynamic,
    /// Bits of the period number on the first levels, `OddEvenDynamic` below.
    BitEncode,
    /// Always probe.
    FullDynamic,
    /// Saved phase, else probe.
    HalfDynamic,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::FSave,
        Scheme::TSave,
        Scheme::FAllSave,
        Scheme::OddEvenDynamic,
        Scheme::BitEncode,
        Scheme::FullDynamic,
        Scheme::HalfDynamic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::FSave => "f-save",
            Scheme::TSave => "t-save",
            Scheme::FAllSave => "f-all-save",
            Scheme::OddEvenDynamic => "odd-even",
            Scheme::BitEncode => "bit-encode",
            Scheme::FullDynamic => "full-dynamic",
            Scheme::HalfDynamic => "half-dynamic",
        }
    }

    pub fn granularity(self) -> SaveGranularity {
        match self {
            Scheme::FSave | Scheme::TSave | Scheme::OddEvenDynamic | Scheme::BitEncode => {
                SaveGranularity::LastLevelOnly
            }
            Scheme::FAllSave | Scheme::FullDynamic | Scheme::HalfDynamic => {
                SaveGranularity::AllLevels
            }
        }
    }

    fn code(self) -> u8 {
        Scheme::ALL.iter().position(|&s| s == self).unwrap() as u8
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown {kind} {value:?}")]
pub struct UnknownName {
    kind: &'static str,
    value: String,
}

impl FromStr for Scheme {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<Scheme, UnknownName> {
        let normalized = s.to_ascii_lowercase().replace(['_', '+'], "-");
        let scheme = match normalized.as_str() {
            "f-save" | "fsave" => Scheme::FSave,
            "t-save" | "tsave" => Scheme::TSave,
            "f-all-save" | "fallsave" => Scheme::FAllSave,
            "odd-even" | "odd-even-dynamic" | "oddeven" => Scheme::OddEvenDynamic,
            "bit-encode" | "bitencode" => Scheme::BitEncode,
            "full-dynamic" | "full" => Scheme::FullDynamic,
            "half-dynamic" | "half" => Scheme::HalfDynamic,
            _ => {
                return Err(UnknownName {
                    kind: "phase scheme",
                    value: s.to_string(),
                })
            }
        };
        Ok(scheme)
    }
}

/// The scheme in force for one search period. `bit_overlay` replaces the
/// first levels with the period number's bits, as in the stalled small
/// formula rotation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ActiveScheme {
    pub scheme: Scheme,
    pub bit_overlay: bool,
}

impl ActiveScheme {
    pub fn plain(scheme: Scheme) -> ActiveScheme {
        ActiveScheme {
            scheme,
            bit_overlay: false,
        }
    }

    pub fn with_bits(scheme: Scheme) -> ActiveScheme {
        ActiveScheme {
            scheme,
            bit_overlay: true,
        }
    }

    pub fn code(self) -> u8 {
        self.scheme.code() | (self.bit_overlay as u8) << 4
    }
}

impl fmt::Display for ActiveScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bit_overlay {
            write!(f, "{}+bits", self.scheme)
        } else {
            write!(f, "{}", self.scheme)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SaveGranularity {
    LastLevelOnly,
    AllLevels,
}

#[derive(Clone, Debug)]
pub struct SavedPhases {
    value: Vec<Option<bool>>,
}

impl SavedPhases {
    pub fn new(num_vars: usize) -> SavedPhases {
        SavedPhases {
            value: vec![None; num_vars],
        }
    }

    pub fn get(&self, var: Var) -> Option<bool> {
        self.value[var.index()]
    }

    pub fn set(&mut self, var: Var, polarity: bool) {
        self.value[var.index()] = Some(polarity);
    }

    /// Records the polarities of variables removed by a backjump from
    /// `deepest_level`.
    pub fn save(
        &mut self,
        granularity: SaveGranularity,
        unassigned: impl IntoIterator<Item = (Var, u32, bool)>,
        deepest_level: u32,
    ) {
        for (var, level, polarity) in unassigned {
            if granularity == SaveGranularity::AllLevels || level == deepest_level {
                self.set(var, polarity);
            }
        }
    }
}

/// Scheduler thresholds. Conflict and literal counts are scaled by
/// `--threshold-scale`; the level count, fixed fraction and fixed-variable
/// floor are structural and stay as given.
#[derive(Clone, Debug, PartialEq)]
pub struct SchedulerThresholds {
    pub large_formula_literals: u64,
    pub large_initial_conflicts: u64,
    pub fixed_fraction: f64,
    pub small_stall_conflicts: u64,
    pub small_stall_fixed: u64,
    pub global_rotation_conflicts: u64,
    pub bitencode_levels: u32,
    pub lng_large_literals: u64,
    pub lng_large_stage1: u64,
    pub lng_large_stage2: u64,
    pub lng_small_stage1: u64,
    pub lng_small_stage2: u64,
}

impl Default for SchedulerThresholds {
    fn default() -> SchedulerThresholds {
        SchedulerThresholds {
            large_formula_literals: 1_600_000,
            large_initial_conflicts: 1_000_000,
            fixed_fraction: 0.01,
            small_stall_conflicts: 600_000,
            small_stall_fixed: 3,
            global_rotation_conflicts: 5_000_000,
            bitencode_levels: 6,
            lng_large_literals: 1_500,
            lng_large_stage1: 300_000,
            lng_large_stage2: 100_000,
            lng_small_stage1: 10_000,
            lng_small_stage2: 490_000,
        }
    }
}

impl SchedulerThresholds {
    pub fn scaled(scale: f64) -> SchedulerThresholds {
        assert!(scale > 0.0 && scale.is_finite(), "threshold scale must be positive");
        let s = |v: u64| ((v as f64 * scale).round() as u64).max(1);
        let d = SchedulerThresholds::default();
        SchedulerThresholds {
            large_formula_literals: s(d.large_formula_literals),
            large_initial_conflicts: s(d.large_initial_conflicts),
            small_stall_conflicts: s(d.small_stall_conflicts),
            global_rotation_conflicts: s(d.global_rotation_conflicts),
            lng_large_literals: s(d.lng_large_literals),
            lng_large_stage1: s(d.lng_large_stage1),
            lng_large_stage2: s(d.lng_large_stage2),
            lng_small_stage1: s(d.lng_small_stage1),
            lng_small_stage2: s(d.lng_small_stage2),
            ..d
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchedulerKind {
    GlucoseStyle,
    LingelingStyle,
    Fixed,
}

impl FromStr for SchedulerKind {
    type Err = UnknownName;

    fn from_str(s: &str) -> Result<SchedulerKind, UnknownName> {
        match s.to_ascii_lowercase().as_str() {
            "glucose" => Ok(SchedulerKind::GlucoseStyle),
            "lingeling" => Ok(SchedulerKind::LingelingStyle),
            "fixed" => Ok(SchedulerKind::Fixed),
            _ => Err(UnknownName {
                kind: "phase scheduler",
                value: s.to_string(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseConfig {
    pub scheduler: SchedulerKind,
    /// Scheme used by the `Fixed` scheduler.
    pub fixed_scheme: Scheme,
    pub thresholds: SchedulerThresholds,
    /// Added to the period number before comparing parities in the odd-even
    /// rule.
    pub oddeven_origin: u32,
    /// Rotation entered by large formulas once a period fixes enough
    /// variables.
    pub large_rotation: [Scheme; 3],
}

impl Default for PhaseConfig {
    fn default() -> PhaseConfig {
        PhaseConfig {
            scheduler: SchedulerKind::GlucoseStyle,
            fixed_scheme: Scheme::FAllSave,
            thresholds: SchedulerThresholds::default(),
            oddeven_origin: 0,
            large_rotation: [Scheme::OddEvenDynamic, Scheme::FSave, Scheme::TSave],
        }
    }
}

impl PhaseConfig {
    pub fn fixed(scheme: Scheme) -> PhaseConfig {
        PhaseConfig {
            scheduler: SchedulerKind::Fixed,
            fixed_scheme: scheme,
            ..PhaseConfig::default()
        }
    }
}

/// Solver counters the scheduler sees at a period boundary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PeriodInput {
    /// Number of the period that is starting (= restarts so far).
    pub period: u64,
    pub conflicts: u64,
    pub fixed_vars: u64,
    pub num_vars: u64,
    pub literal_occurrences: u64,
}

/// How the polarity of one decision is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhaseRule {
    Polarity(bool),
    Probe,
}

/// Outcome of probing both polarities of a decision variable.
///
/// `dw_pos`/`dw_neg` are the summed static weights of the trail segment
/// produced by asserting the respective polarity (the asserted literal
/// included). A side that was not reached, or that ended in conflict, is
/// reported as 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub chosen: Lit,
    pub dw_pos: f64,
    pub dw_neg: f64,
    pub bcp_passes: u8,
    /// The polarity whose propagation failed, and the falsified clause.
    pub conflict: Option<(bool, ClauseRef)>,
    /// Trail segments of each pass, captured when requested.
    pub segments: Option<ProbeSegments>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProbeSegments {
    pub positive: Vec<Lit>,
    pub negative: Vec<Lit>,
}

/// The solver operations a probe needs. The current decision level must
/// already be open and empty when the probe starts.
pub trait ProbeHost {
    fn weights(&self) -> &StaticWeightTable;
    /// Puts `lit` on the trail as the decision of the current level.
    fn assign_decision(&mut self, lit: Lit);
    /// Unit propagation to fixpoint; returns the falsified clause on conflict.
    fn propagate(&mut self) -> Option<ClauseRef>;
    fn trail(&self) -> &[Lit];
    /// Trail index where the current decision level begins.
    fn level_start(&self) -> usize;
    /// Removes every assignment of the current level without saving phases.
    fn undo_level(&mut self);
}

/// Probes `var` positively then negatively and commits to the polarity of
/// higher dynamic weight. Ties go to the positive polarity. On return
/// without conflict the trail holds the chosen polarity propagated to
/// fixpoint; on conflict the failing assignment is left on the trail.
pub fn dynamic_probe<H: ProbeHost>(host: &mut H, var: Var, capture: bool) -> ProbeResult {
    let start = host.level_start();
    debug_assert_eq!(start, host.trail().len(), "probe needs an empty level");
    let positive = var.positive();
    let mut segments = capture.then(ProbeSegments::default);

    host.assign_decision(positive);
    if let Some(clause) = host.propagate() {
        return ProbeResult {
            chosen: positive,
            dw_pos: 0.0,
            dw_neg: 0.0,
            bcp_passes: 1,
            conflict: Some((true, clause)),
            segments,
        };
    }
    let dw_pos = host.weights().sum(&host.trail()[start..]);
    if let Some(s) = segments.as_mut() {
        s.positive = host.trail()[start..].to_vec();
    }
    host.undo_level();

    host.assign_decision(!positive);
    if let Some(clause) = host.propagate() {
        return ProbeResult {
            chosen: !positive,
            dw_pos,
            dw_neg: 0.0,
            bcp_passes: 2,
            conflict: Some((false, clause)),
            segments,
        };
    }
    let dw_neg = host.weights().sum(&host.trail()[start..]);
    if let Some(s) = segments.as_mut() {
        s.negative = host.trail()[start..].to_vec();
    }
    if dw_neg > dw_pos {
        return ProbeResult {
            chosen: !positive,
            dw_pos,
            dw_neg,
            bcp_passes: 2,
            conflict: None,
            segments,
        };
    }
    host.undo_level();

    host.assign_decision(positive);
    // Same trail prefix and clause set as pass 1, so this cannot fail unless
    // propagation is nondeterministic.
    let conflict = host.propagate().map(|clause| (true, clause));
    debug_assert!(conflict.is_none(), "pass 3 diverged from pass 1");
    ProbeResult {
        chosen: positive,
        dw_pos,
        dw_neg,
        bcp_passes: 3,
        conflict,
        segments,
    }
}

#[derive(Clone, Debug, Default)]
struct SchedulerState {
    period_fixed_baseline: u64,
    global_rotation_start: Option<u64>,
    large_rotation_start: Option<u64>,
    /// `Some(start)` once the small-formula stall test has fired.
    stall_rotation_start: Option<u64>,
    stall_checked: bool,
}

/// Phase selection state of one solver: the active scheme, the saved
/// phases and the scheduler bookkeeping.
#[derive(Clone, Debug)]
pub struct PhasePolicy {
    config: PhaseConfig,
    active: ActiveScheme,
    period: u64,
    saved: SavedPhases,
    state: SchedulerState,
    log: Vec<ActiveScheme>,
    inputs: Vec<PeriodInput>,
}

impl PhasePolicy {
    /// Creates the policy and selects the scheme for period 0.
    pub fn new(config: PhaseConfig, start: PeriodInput) -> PhasePolicy {
        let num_vars = start.num_vars as usize;
        let mut policy = PhasePolicy {
            active: ActiveScheme::plain(config.fixed_scheme),
            config,
            period: 0,
            saved: SavedPhases::new(num_vars),
            state: SchedulerState {
                period_fixed_baseline: start.fixed_vars,
                ..SchedulerState::default()
            },
            log: Vec::new(),
            inputs: Vec::new(),
        };
        policy.on_period_start(PeriodInput { period: 0, ..start });
        policy
    }

    pub fn config(&self) -> &PhaseConfig {
        &self.config
    }

    pub fn active(&self) -> ActiveScheme {
        self.active
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn saved(&self) -> &SavedPhases {
        &self.saved
    }

    pub fn saved_mut(&mut self) -> &mut SavedPhases {
        &mut self.saved
    }

    /// The scheme of every period so far, in order.
    pub fn scheme_log(&self) -> &[ActiveScheme] {
        &self.log
    }

    /// The counters each period's scheme was chosen from, aligned with
    /// [`scheme_log`](Self::scheme_log).
    pub fn period_inputs(&self) -> &[PeriodInput] {
        &self.inputs
    }

    /// Sets the fixed-variable count the current period's gain is measured
    /// from.
    pub fn reset_fixed_baseline(&mut self, fixed_vars: u64) {
        self.state.period_fixed_baseline = fixed_vars;
    }

    /// Selects and installs the scheme for the period that is starting.
    pub fn on_period_start(&mut self, input: PeriodInput) -> ActiveScheme {
        let gain = input
            .fixed_vars
            .saturating_sub(self.state.period_fixed_baseline);
        self.state.period_fixed_baseline = input.fixed_vars;
        self.period = input.period;
        self.active = match self.config.scheduler {
            SchedulerKind::Fixed => ActiveScheme::plain(self.config.fixed_scheme),
            SchedulerKind::GlucoseStyle => self.glucose_schedule(&input, gain),
            SchedulerKind::LingelingStyle => self.lingeling_schedule(&input),
        };
        self.log.push(self.active);
        self.inputs.push(input);
        self.active
    }

    fn glucose_schedule(&mut self, input: &PeriodInput, gain: u64) -> ActiveScheme {
        let t = &self.config.thresholds;
        let n = input.period;
        if input.conflicts >= t.global_rotation_conflicts {
            let start = *self.state.global_rotation_start.get_or_insert(n);
            let rotation = [Scheme::TSave, Scheme::FSave, Scheme::OddEvenDynamic];
            return ActiveScheme::plain(rotation[((n - start) % 3) as usize]);
        }
        if input.literal_occurrences > t.large_formula_literals {
            if input.conflicts >= t.large_initial_conflicts {
                return ActiveScheme::plain(Scheme::FAllSave);
            }
            if self.state.large_rotation_start.is_none()
                && gain as f64 > t.fixed_fraction * input.num_vars as f64
            {
                self.state.large_rotation_start = Some(n);
            }
            return match self.state.large_rotation_start {
                Some(start) => {
                    ActiveScheme::plain(self.config.large_rotation[((n - start) % 3) as usize])
                }
                None => ActiveScheme::plain(Scheme::FAllSave),
            };
        }
        if !self.state.stall_checked && input.conflicts >= t.small_stall_conflicts {
            self.state.stall_checked = true;
            if input.fixed_vars < t.small_stall_fixed {
                self.state.stall_rotation_start = Some(n);
            }
        }
        match self.state.stall_rotation_start {
            Some(start) => match (n - start) % 3 {
                0 => ActiveScheme::with_bits(Scheme::TSave),
                1 => ActiveScheme::with_bits(Scheme::FSave),
                _ => ActiveScheme::plain(Scheme::OddEvenDynamic),
            },
            None => ActiveScheme::plain(Scheme::OddEvenDynamic),
        }
    }

    fn lingeling_schedule(&self, input: &PeriodInput) -> ActiveScheme {
        let t = &self.config.thresholds;
        let c = input.conflicts;
        let (first, second, stage1, stage2) = if input.literal_occurrences > t.lng_large_literals {
            (
                Scheme::HalfDynamic,
                Scheme::FullDynamic,
                t.lng_large_stage1,
                t.lng_large_stage2,
            )
        } else {
            (
                Scheme::FullDynamic,
                Scheme::HalfDynamic,
                t.lng_small_stage1,
                t.lng_small_stage2,
            )
        };
        let scheme = if c < stage1 {
            first
        } else if c < stage1 + stage2 {
            second
        } else {
            first
        };
        ActiveScheme::plain(scheme)
    }

    fn bit(&self, level: u32) -> bool {
        let shift = level - 1;
        shift < 64 && (self.period >> shift) & 1 == 1
    }

    fn odd_even_rule(&self, var: Var, level: u32) -> PhaseRule {
        let period = self.period + self.config.oddeven_origin as u64;
        if period % 2 == (level % 2) as u64 {
            PhaseRule::Probe
        } else {
            PhaseRule::Polarity(self.saved.get(var).unwrap_or(false))
        }
    }

    /// How the decision on `var` at `level` (≥ 1) gets its polarity under
    /// the active scheme.
    pub fn rule(&self, var: Var, level: u32) -> PhaseRule {
        let bit_levels = self.config.thresholds.bitencode_levels;
        let in_bit_range = level >= 1 && level <= bit_levels;
        if self.active.bit_overlay && in_bit_range {
            return PhaseRule::Polarity(self.bit(level));
        }
        let saved = self.saved.get(var);
        match self.active.scheme {
            Scheme::FSave | Scheme::FAllSave => PhaseRule::Polarity(saved.unwrap_or(false)),
            Scheme::TSave => PhaseRule::Polarity(saved.unwrap_or(true)),
            Scheme::OddEvenDynamic => self.odd_even_rule(var, level),
            Scheme::BitEncode if in_bit_range => PhaseRule::Polarity(self.bit(level)),
            Scheme::BitEncode => self.odd_even_rule(var, level),
            Scheme::FullDynamic => PhaseRule::Probe,
            Scheme::HalfDynamic => saved.map_or(PhaseRule::Probe, PhaseRule::Polarity),
        }
    }

    /// Picks the polarity of `var`, probing through `host` if the active
    /// scheme asks for it. The level for `var` must already be open.
    pub fn select_phase<H: ProbeHost>(&self, var: Var, level: u32, host: &mut H) -> PhaseChoice {
        match self.rule(var, level) {
            PhaseRule::Polarity(p) => PhaseChoice::Static(var.lit(p)),
            PhaseRule::Probe => PhaseChoice::Probed(dynamic_probe(host, var, false)),
        }
    }

    /// Saves phases of the variables removed by a backjump, at the
    /// granularity of the active scheme.
    pub fn on_backjump(
        &mut self,
        unassigned: impl IntoIterator<Item = (Var, u32, bool)>,
        deepest_level: u32,
    ) {
        let granularity = self.active.scheme.granularity();
        self.saved.save(granularity, unassigned, deepest_level);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PhaseChoice {
    /// Polarity chosen without touching the trail; the caller assigns it.
    Static(Lit),
    /// A probe ran and already left its outcome on the trail.
    Probed(ProbeResult),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: u32) -> Var {
        Var::from_dimacs(n)
    }

    fn policy(config: PhaseConfig) -> PhasePolicy {
        PhasePolicy::new(
            config,
            PeriodInput {
                num_vars: 10,
                literal_occurrences: 30,
                ..PeriodInput::default()
            },
        )
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("F+All_save".parse::<Scheme>().unwrap(), Scheme::FAllSave);
        assert!("nope".parse::<Scheme>().is_err());
    }

    #[test]
    fn last_level_only_saving() {
        let mut saved = SavedPhases::new(2);
        saved.save(
            SaveGranularity::LastLevelOnly,
            [(var(1), 3, true), (var(2), 5, false)],
            5,
        );
        assert_eq!(saved.get(var(1)), None);
        assert_eq!(saved.get(var(2)), Some(false));
    }

    #[test]
    fn all_levels_saving() {
        let mut saved = SavedPhases::new(2);
        saved.save(
            SaveGranularity::AllLevels,
            [(var(1), 3, true), (var(2), 5, false)],
            5,
        );
        assert_eq!(saved.get(var(1)), Some(true));
        assert_eq!(saved.get(var(2)), Some(false));
    }

    #[test]
    fn empty_backjump_changes_nothing() {
        let mut p = policy(PhaseConfig::fixed(Scheme::FSave));
        p.on_backjump(std::iter::empty(), 4);
        assert!((1..=10).all(|v| p.saved().get(var(v)).is_none()));
    }

    #[test]
    fn static_scheme_defaults() {
        let p = policy(PhaseConfig::fixed(Scheme::TSave));
        assert_eq!(p.rule(var(1), 1), PhaseRule::Polarity(true));
        let p = policy(PhaseConfig::fixed(Scheme::FSave));
        assert_eq!(p.rule(var(1), 1), PhaseRule::Polarity(false));
        let p = policy(PhaseConfig::fixed(Scheme::FAllSave));
        assert_eq!(p.rule(var(1), 7), PhaseRule::Polarity(false));
        let p = policy(PhaseConfig::fixed(Scheme::FullDynamic));
        assert_eq!(p.rule(var(1), 2), PhaseRule::Probe);
    }

    #[test]
    fn half_dynamic_uses_saved_value_without_probing() {
        let mut p = policy(PhaseConfig::fixed(Scheme::HalfDynamic));
        assert_eq!(p.rule(var(3), 1), PhaseRule::Probe);
        p.saved_mut().set(var(3), false);
        assert_eq!(p.rule(var(3), 1), PhaseRule::Polarity(false));
    }

    #[test]
    fn bit_encode_period_five() {
        let mut p = policy(PhaseConfig::fixed(Scheme::BitEncode));
        p.on_period_start(PeriodInput {
            period: 5,
            num_vars: 10,
            ..PeriodInput::default()
        });
        let bits: Vec<_> = (1..=3).map(|l| p.rule(var(1), l)).collect();
        assert_eq!(
            bits,
            vec![
                PhaseRule::Polarity(true),
                PhaseRule::Polarity(false),
                PhaseRule::Polarity(true)
            ]
        );
    }

    #[test]
    fn odd_even_parity() {
        // Period 0 probes at even levels, period 1 at odd levels.
        let mut p = policy(PhaseConfig::fixed(Scheme::OddEvenDynamic));
        assert_eq!(p.rule(var(1), 2), PhaseRule::Probe);
        assert_eq!(p.rule(var(1), 1), PhaseRule::Polarity(false));
        p.on_period_start(PeriodInput {
            period: 1,
            ..PeriodInput::default()
        });
        assert_eq!(p.rule(var(1), 1), PhaseRule::Probe);
        assert_eq!(p.rule(var(1), 2), PhaseRule::Polarity(false));

        let p = policy(PhaseConfig {
            oddeven_origin: 1,
            ..PhaseConfig::fixed(Scheme::OddEvenDynamic)
        });
        assert_eq!(p.rule(var(1), 1), PhaseRule::Probe);
    }

    #[test]
    fn scaled_thresholds_keep_structural_values() {
        let t = SchedulerThresholds::scaled(1e-3);
        assert_eq!(t.global_rotation_conflicts, 5_000);
        assert_eq!(t.large_formula_literals, 1_600);
        assert_eq!(t.lng_small_stage1, 10);
        assert_eq!(t.bitencode_levels, 6);
        assert_eq!(t.small_stall_fixed, 3);
        assert_eq!(t.fixed_fraction, 0.01);
        assert_eq!(SchedulerThresholds::scaled(1e-9).lng_large_literals, 1);
    }

    #[test]
    fn glucose_small_default_is_odd_even() {
        let mut p = policy(PhaseConfig::default());
        let s = p.on_period_start(PeriodInput {
            period: 3,
            conflicts: 10_000,
            fixed_vars: 5,
            num_vars: 10,
            literal_occurrences: 30,
        });
        assert_eq!(s, ActiveScheme::plain(Scheme::OddEvenDynamic));
    }

    #[test]
    fn lingeling_large_stage_two() {
        let mut p = policy(PhaseConfig {
            scheduler: SchedulerKind::LingelingStyle,
            ..PhaseConfig::default()
        });
        let s = p.on_period_start(PeriodInput {
            period: 9,
            conflicts: 350_000,
            fixed_vars: 0,
            num_vars: 500,
            literal_occurrences: 2_000,
        });
        assert_eq!(s.scheme, Scheme::FullDynamic);
    }

    #[test]
    fn global_rotation() {
        let mut p = policy(PhaseConfig::default());
        let input = |period| PeriodInput {
            period,
            conflicts: 6_000_000,
            fixed_vars: 0,
            num_vars: 10,
            literal_occurrences: 30,
        };
        let got: Vec<_> = (20..24).map(|n| p.on_period_start(input(n)).scheme).collect();
        assert_eq!(
            got,
            vec![
                Scheme::TSave,
                Scheme::FSave,
                Scheme::OddEvenDynamic,
                Scheme::TSave
            ]
        );
    }

    /// Probe host over binary implications only: asserting `l` implies every
    /// literal of `implies[l]`, transitively.
    struct ImplicationHost {
        weights: StaticWeightTable,
        implies: Vec<Vec<Lit>>,
        value: Vec<Option<bool>>,
        trail: Vec<Lit>,
        head: usize,
    }

    impl ImplicationHost {
        fn new(num_vars: usize, edges: &[(Lit, Lit)], unit_counts: &[usize]) -> ImplicationHost {
            let mut implies = vec![Vec::new(); 2 * num_vars];
            for &(a, b) in edges {
                implies[a.code()].push(b);
            }
            // n unit clauses on a literal give it weight 5n: exact under
            // scaling by 0.5 and 7.
            let units: Vec<Vec<Lit>> = unit_counts
                .iter()
                .enumerate()
                .flat_map(|(code, &n)| std::iter::repeat_n(vec![Lit::from_code(code)], n))
                .collect();
            let mut weights = StaticWeightTable::new(num_vars, 0);
            weights.recompute(units.iter().map(|c| c.as_slice()), 0);
            ImplicationHost {
                weights,
                implies,
                value: vec![None; num_vars],
                trail: Vec::new(),
                head: 0,
            }
        }
    }

    impl ProbeHost for ImplicationHost {
        fn weights(&self) -> &StaticWeightTable {
            &self.weights
        }

        fn assign_decision(&mut self, lit: Lit) {
            self.value[lit.var().index()] = Some(lit.is_positive());
            self.trail.push(lit);
        }

        fn propagate(&mut self) -> Option<ClauseRef> {
            while self.head < self.trail.len() {
                let lit = self.trail[self.head];
                self.head += 1;
                for &next in &self.implies[lit.code()] {
                    match self.value[next.var().index()] {
                        None => {
                            self.value[next.var().index()] = Some(next.is_positive());
                            self.trail.push(next);
                        }
                        Some(v) if v != next.is_positive() => return Some(ClauseRef::from_index(0)),
                        Some(_) => {}
                    }
                }
            }
            None
        }

        fn trail(&self) -> &[Lit] {
            &self.trail
        }

        fn level_start(&self) -> usize {
            0
        }

        fn undo_level(&mut self) {
            for lit in self.trail.drain(..) {
                self.value[lit.var().index()] = None;
            }
            self.head = 0;
        }
    }

    use proptest::prelude::*;

    fn host_strategy() -> impl Strategy<Value = (usize, Vec<(Lit, Lit)>, Vec<usize>)> {
        (2usize..8).prop_flat_map(|n| {
            let lit = (0..2 * n).prop_map(Lit::from_code);
            (
                Just(n),
                prop::collection::vec((lit.clone(), lit), 0..3 * n),
                prop::collection::vec(0usize..4, 2 * n),
            )
        })
    }

    proptest! {
        #[test]
        fn bit_encode_follows_period_bits(n in 0u64..64, level in 1u32..=6) {
            let mut p = policy(PhaseConfig::fixed(Scheme::BitEncode));
            p.on_period_start(PeriodInput { period: n, num_vars: 10, ..PeriodInput::default() });
            prop_assert_eq!(p.rule(var(1), level), PhaseRule::Polarity((n >> (level - 1)) & 1 == 1));
        }

        #[test]
        fn probe_choice_survives_weight_scaling((n, edges, units) in host_strategy()) {
            let probed = Var::from_index(0);
            let mut host = ImplicationHost::new(n, &edges, &units);
            let base = dynamic_probe(&mut host, probed, false);
            prop_assume!(base.conflict.is_none());
            prop_assert!(base.bcp_passes <= 3);
            for factor in [0.5, 7.0] {
                let mut scaled = ImplicationHost::new(n, &edges, &units);
                scaled.weights.scale(factor);
                let again = dynamic_probe(&mut scaled, probed, false);
                prop_assert_eq!(again.chosen, base.chosen);
                prop_assert_eq!(again.dw_pos, base.dw_pos * factor);
                prop_assert_eq!(again.dw_neg, base.dw_neg * factor);
            }
            // The committed side is what remains on the trail.
            prop_assert_eq!(host.trail.first(), Some(&base.chosen));
        }
    }
}
