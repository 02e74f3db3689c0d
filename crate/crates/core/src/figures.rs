//! Data behind each figure panel, registered by panel name.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::closedform;
use crate::error::{Error, Result};
use crate::grid;
use crate::output::{self, Metadata, Table};
use crate::params::{self, SystemParams, DEFAULT_LIMIT_FACTOR};
use crate::poleatlas::{self, PoleSet, Sweep, SweepVariable, Trajectories};
use crate::scan::{self, parallel_map, Numeric};

pub const SWEEP_POINTS: usize = 100;
pub const MAP_POINTS: usize = 100;

/// Parameters set on the command line on top of a figure's own.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamOverrides {
    pub nu: Option<f64>,
    pub gamma_l: Option<f64>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub delta1: Option<f64>,
}

impl ParamOverrides {
    pub fn apply(&self, mut p: SystemParams) -> SystemParams {
        p.nu = self.nu.unwrap_or(p.nu);
        p.gamma_l = self.gamma_l.unwrap_or(p.gamma_l);
        p.eps1 = self.eps1.unwrap_or(p.eps1);
        p.eps2 = self.eps2.unwrap_or(p.eps2);
        p.delta1 = self.delta1.unwrap_or(p.delta1);
        p
    }
}

/// One CSV file and its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub table: Table,
    pub meta: Metadata,
}

pub trait Figure: Send + Sync {
    fn name(&self) -> &'static str;

    fn caption(&self) -> &'static str;

    /// Parameters after applying `o` to the figure's own.
    fn params(&self, o: &ParamOverrides) -> SystemParams;

    fn render(&self, o: &ParamOverrides, threads: Option<usize>) -> Result<Vec<Panel>>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ClockRabi {
    Fixed(f64),
    /// Multiple of the critical value at the figure's other parameters.
    Critical(f64),
}

fn figure_params(eps1: f64, eps2: ClockRabi, delta1: f64, o: &ParamOverrides) -> SystemParams {
    let mut p = o.apply(SystemParams::with_rabi(eps1, 0.0).delta1(delta1));
    p.eps2 = match (o.eps2, eps2) {
        (Some(v), _) => v,
        (None, ClockRabi::Fixed(v)) => v,
        (None, ClockRabi::Critical(f)) => f * closedform::critical_eps2(&p),
    };
    p
}

fn hierarchy_warnings(p: &SystemParams) -> Vec<String> {
    params::check_limit_hierarchy(p, DEFAULT_LIMIT_FACTOR).iter().map(ToString::to_string).collect()
}

/// ρ₁₁ and the coherences against δ₂ on the default grid.
struct SpectrumFigure {
    name: &'static str,
    caption: &'static str,
    eps1: f64,
    eps2: ClockRabi,
    delta1: f64,
}

impl Figure for SpectrumFigure {
    fn name(&self) -> &'static str {
        self.name
    }

    fn caption(&self) -> &'static str {
        self.caption
    }

    fn params(&self, o: &ParamOverrides) -> SystemParams {
        figure_params(self.eps1, self.eps2, self.delta1, o)
    }

    fn render(&self, o: &ParamOverrides, threads: Option<usize>) -> Result<Vec<Panel>> {
        let p = self.params(o).normalize()?;
        let (g, spec) = grid::default_delta2(&p)?;
        let s = scan::scan(&p, &g, &Numeric, threads)?;
        let table = output::scan_table(&format!("fig{}", self.name), &s);
        let meta = Metadata::new(&p, "numeric", &spec, hierarchy_warnings(&p))?;
        Ok(vec![Panel { table, meta }])
    }
}

/// Long-form ρ₁₁ map over (ε₁, δ₂).
struct PumpMapFigure;

impl PumpMapFigure {
    const EPS1: (f64, f64) = (0.1, 5.0);
    const DELTA2_HALF_SPAN: f64 = 15.0;
}

impl Figure for PumpMapFigure {
    fn name(&self) -> &'static str {
        "1d"
    }

    fn caption(&self) -> &'static str {
        "excited-state population over pump Rabi frequency and probe detuning, eps2 = 0.1"
    }

    fn params(&self, o: &ParamOverrides) -> SystemParams {
        figure_params(Self::EPS1.0, ClockRabi::Fixed(0.1), 0.0, o)
    }

    fn render(&self, o: &ParamOverrides, threads: Option<usize>) -> Result<Vec<Panel>> {
        let p = self.params(o).normalize()?;
        let eps1 = grid::uniform(Self::EPS1.0, Self::EPS1.1, MAP_POINTS)?;
        let delta2 = grid::symmetric(Self::DELTA2_HALF_SPAN, MAP_POINTS)?;
        let points: Vec<(f64, f64)> = eps1.iter().flat_map(|&e| delta2.iter().map(move |&d| (e, d))).collect();
        let rows = parallel_map(&points, threads, |&(e, d)| {
            crate::master::solve(&p.eps1(e).delta2(d)).map(|s| vec![Some(e), Some(d), Some(s.rho11())])
        });
        let mut table = Table::new("fig1d", &["eps1", "delta2", "rho11"]);
        for row in rows {
            table.push(row?);
        }
        let spec = json!({
            "eps1": {"lo": Self::EPS1.0, "hi": Self::EPS1.1, "points": MAP_POINTS},
            "delta2": {"half_span": Self::DELTA2_HALF_SPAN, "points": MAP_POINTS},
        });
        let meta = Metadata::new(&p, "numeric", spec, hierarchy_warnings(&p))?;
        Ok(vec![Panel { table, meta }])
    }
}

/// Columns `<sweep>, <part>_lambda1, <part>_lambda2` for the two physical
/// upper-half-plane poles, narrow first.
fn selected_lambda(sets: &[PoleSet], part: fn(num_complex::Complex64) -> f64) -> Vec<[Option<f64>; 2]> {
    sets.iter()
        .map(|s| {
            let up = s.upper();
            let pick = |i: usize| up.get(i).map(|pole| part(pole.location));
            match up.len() {
                0 => [None, None],
                1 => [pick(0), None],
                n => [pick(0), pick(n - 1)],
            }
        })
        .collect()
}

fn track_warnings(tr: &Trajectories) -> Vec<String> {
    tr.warnings.iter().map(|w| format!("{w:?}")).collect()
}

/// λ₁, λ₂ against ε₂ through the critical value.
struct ClockSweepFigure;

impl Figure for ClockSweepFigure {
    fn name(&self) -> &'static str {
        "2"
    }

    fn caption(&self) -> &'static str {
        "real and imaginary parts of lambda1, lambda2 against eps2 at eps1 = 2, delta1 = 0"
    }

    fn params(&self, o: &ParamOverrides) -> SystemParams {
        figure_params(2.0, ClockRabi::Critical(1.0), 0.0, o)
    }

    fn render(&self, o: &ParamOverrides, _threads: Option<usize>) -> Result<Vec<Panel>> {
        let p = self.params(o).normalize()?;
        let c = closedform::critical_eps2(&p.delta1(0.0));
        let g = grid::logarithmic(c / 10.0, 10.0 * c, SWEEP_POINTS)?;
        let tr = poleatlas::track(&p, &Sweep { variable: SweepVariable::Eps2, grid: g.clone() })?;

        let mut tables = Vec::new();
        for (stem, part) in [("re", (|z: num_complex::Complex64| z.re) as fn(_) -> f64), ("im", |z| z.im)] {
            let header = [
                "eps2".to_string(),
                format!("{stem}_lambda1_closed"),
                format!("{stem}_lambda2_closed"),
                format!("{stem}_lambda1_poles"),
                format!("{stem}_lambda2_poles"),
            ];
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let mut t = Table::new(format!("{stem}_lambda"), &header);
            for (&e2, poles) in g.iter().zip(selected_lambda(&tr.sets, part)) {
                let pair = closedform::lambdas(&p.eps2(e2).delta1(0.0)).value;
                t.push(vec![Some(e2), Some(part(pair.lambda1)), Some(part(pair.lambda2)), poles[0], poles[1]]);
            }
            tables.push(t);
        }
        tables.push(output::pole_table("fig2_poles", &tr));

        let mut warnings = hierarchy_warnings(&p);
        warnings.extend(track_warnings(&tr));
        let spec = json!({"eps2": {"log": true, "lo": c / 10.0, "hi": 10.0 * c, "points": SWEEP_POINTS}, "eps2_c": c});
        tables
            .into_iter()
            .map(|table| Ok(Panel { table, meta: Metadata::new(&p, "poles", &spec, warnings.clone())? }))
            .collect()
    }
}

/// Critical clock Rabi frequency against the pump Rabi frequency.
struct BorderFigure;

impl Figure for BorderFigure {
    fn name(&self) -> &'static str {
        "3"
    }

    fn caption(&self) -> &'static str {
        "critical clock Rabi frequency against pump Rabi frequency"
    }

    fn params(&self, o: &ParamOverrides) -> SystemParams {
        o.apply(SystemParams::default())
    }

    fn render(&self, o: &ParamOverrides, _threads: Option<usize>) -> Result<Vec<Panel>> {
        let p = self.params(o).normalize()?;
        let g = grid::logarithmic(0.1, 10.0, SWEEP_POINTS)?;
        let mut table = Table::new("fig3", &["eps1", "eps2_c", "eps2_c_strong"]);
        for b in crate::report::border(&p, &g) {
            table.push(vec![Some(b.eps1), Some(b.eps2_c), Some(b.eps2_c_strong)]);
        }
        let spec = json!({"eps1": {"log": true, "lo": 0.1, "hi": 10.0, "points": SWEEP_POINTS}});
        let meta = Metadata::new(&p, "closedform", spec, Vec::new())?;
        Ok(vec![Panel { table, meta }])
    }
}

/// λ₁, λ₂ against the pump detuning.
struct PumpDetuningFigure {
    name: &'static str,
    caption: &'static str,
    eps1: f64,
    eps2: f64,
}

impl PumpDetuningFigure {
    const DELTA1_SPAN: f64 = 7.0;
}

impl Figure for PumpDetuningFigure {
    fn name(&self) -> &'static str {
        self.name
    }

    fn caption(&self) -> &'static str {
        self.caption
    }

    fn params(&self, o: &ParamOverrides) -> SystemParams {
        figure_params(self.eps1, ClockRabi::Fixed(self.eps2), 0.0, o)
    }

    fn render(&self, o: &ParamOverrides, _threads: Option<usize>) -> Result<Vec<Panel>> {
        let p = self.params(o).normalize()?;
        let g = grid::symmetric(Self::DELTA1_SPAN, SWEEP_POINTS)?;
        let tr = poleatlas::track(&p, &Sweep { variable: SweepVariable::Delta1, grid: g.clone() })?;
        let re = selected_lambda(&tr.sets, |z| z.re);
        let im = selected_lambda(&tr.sets, |z| z.im);
        let mut t = Table::new(
            format!("fig{}", self.name),
            &["delta1", "re_lambda1", "im_lambda1", "re_lambda2", "im_lambda2"],
        );
        for ((&d, r), i) in g.iter().zip(re).zip(im) {
            t.push(vec![Some(d), r[0], i[0], r[1], i[1]]);
        }
        let mut warnings = hierarchy_warnings(&p);
        warnings.extend(track_warnings(&tr));
        let spec = json!({"delta1": {"half_span": Self::DELTA1_SPAN, "points": SWEEP_POINTS}});
        let poles = output::pole_table(&format!("fig{}_poles", self.name), &tr);
        [t, poles]
            .into_iter()
            .map(|table| Ok(Panel { table, meta: Metadata::new(&p, "poles", &spec, warnings.clone())? }))
            .collect()
    }
}

#[derive(Clone)]
pub struct FigureRegistry {
    figures: BTreeMap<&'static str, Arc<dyn Figure>>,
}

impl FigureRegistry {
    pub fn empty() -> Self {
        FigureRegistry { figures: BTreeMap::new() }
    }

    pub fn builtin() -> Self {
        let mut r = Self::empty();
        r.register(Arc::new(SpectrumFigure {
            name: "1b",
            caption: "Autler-Townes regime: two dips at eps1 = 2, eps2 = 0.3 eps2_c",
            eps1: 2.0,
            eps2: ClockRabi::Critical(0.3),
            delta1: 0.0,
        }));
        r.register(Arc::new(SpectrumFigure {
            name: "1c",
            caption: "coherence regime: narrow central peak at eps1 = 2, eps2 = 0.2",
            eps1: 2.0,
            eps2: ClockRabi::Fixed(0.2),
            delta1: 0.0,
        }));
        r.register(Arc::new(PumpMapFigure));
        r.register(Arc::new(ClockSweepFigure));
        r.register(Arc::new(BorderFigure));
        r.register(Arc::new(SpectrumFigure {
            name: "4",
            caption: "rho12 coherence in the coherence regime, eps1 = 0.8, eps2 = 0.2",
            eps1: 0.8,
            eps2: ClockRabi::Fixed(0.2),
            delta1: 0.0,
        }));
        r.register(Arc::new(SpectrumFigure {
            name: "5a",
            caption: "detuned pump, Autler-Townes regime: eps1 = 10, eps2 = 1e-3, delta1 = 7",
            eps1: 10.0,
            eps2: ClockRabi::Fixed(1e-3),
            delta1: 7.0,
        }));
        r.register(Arc::new(SpectrumFigure {
            name: "5b",
            caption: "detuned pump, coherence regime: eps1 = 0.8, eps2 = 0.2, delta1 = 7",
            eps1: 0.8,
            eps2: ClockRabi::Fixed(0.2),
            delta1: 7.0,
        }));
        r.register(Arc::new(PumpDetuningFigure {
            name: "6a",
            caption: "lambda1, lambda2 against delta1, Autler-Townes regime: eps1 = 10, eps2 = 1e-3",
            eps1: 10.0,
            eps2: 1e-3,
        }));
        r.register(Arc::new(PumpDetuningFigure {
            name: "6b",
            caption: "lambda1, lambda2 against delta1, coherence regime: eps1 = 0.8, eps2 = 0.2",
            eps1: 0.8,
            eps2: 0.2,
        }));
        r
    }

    pub fn register(&mut self, figure: Arc<dyn Figure>) {
        self.figures.insert(figure.name(), figure);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Figure>> {
        self.figures.get(name).cloned().ok_or_else(|| Error::UnknownFigure(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.figures.keys().copied()
    }
}

impl Default for FigureRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}
