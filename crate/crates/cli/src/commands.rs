//! Subcommand implementations: each returns structured results, flat rows for
//! CSV/text output and the formula descriptors behind them.

use anyhow::Result;
use casimir_core::budget::{assemble_budget, FieldConfiguration, Kappas, PolarizabilityChoice};
use casimir_core::continuum::{kappa1_continuum, kappa2_continuum, ymin_sensitivity, ContinuumResult, Kappa};
use casimir_core::renormalization::{
    casimir_mass_density, delta_mass, delta_mass_divergence_exponent, delta_mass_doubling_limit, divergence_exponent,
    geometric_grid, mass_renormalization, reduced_mass_shift_two_sided, CutoffScheme, DispersionModel, MassRoute,
    UnitContext,
};
use casimir_core::spectral::{normalization_constant, SpectralSumResult, SpectralSums};
use casimir_core::units::{constants, AtomicParams};
use serde_json::{json, Map, Value};

use crate::config::{
    BetheArgs, BudgetArgs, Command, ContinuumArgs, KappaChoice, KappasArgs, ModelChoice, PolarizabilityArg,
    PolarizabilityArgs, RenormArgs, RhoCArgs,
};
use crate::report::Row;
use crate::verify;

pub mod formula {
    pub const KAPPA1_D: &str = "kappa1(D) = (2/27) sum_n I1(n) I3(n) / dE_n^2";
    pub const KAPPA2_D: &str = "kappa2(D) = (1/27) sum_n I2(n) I3(n) / dE_n";
    pub const KAPPA1_C: &str = "kappa1(C) = (8/27)(16/pi) int y^3/(y^2+1)^3 (atan(y)/y^2 - 1/(y sqrt(y^2+1))) dy";
    pub const KAPPA2_C: &str = "kappa2(C) = (256/(27 pi)) int y^4/(y^2+1)^6 dy";
    pub const TOTAL: &str = "kappa = kappa(D) + kappa(C)";
    pub const ADOPTED: &str = "adopted kappa1 = 0.22, kappa2 = 0.0976";
    pub const NET: &str = "<P_long>/P_A = (-kappa1 + kappa2) alpha^2";
    pub const ALPHA0: &str = "alpha(0) = (2/3) sum_n I3(n)^2 / dE_n  [4 pi eps0 a0^3]";
    pub const ALPHA0_EXACT: &str = "alpha(0) = 18 pi a0^3 = 4.5 [4 pi eps0 a0^3]";
    pub const OSCILLATOR: &str = "sum_n f_n, f_n = (2/3) dE_n I3(n)^2";
    pub const BETHE: &str = "S_B = sum_n I2(n)^2";
    pub const NORMALIZATION: &str = "N / alpha^3 = (1/pi)(-L - 1/2) S_B";
    pub const RHO_C: &str = "rho_C = (2/3)(hbar/(pi^3 c0^5)) int_0^w_max (eps_r(w) - 1) w^3 dw";
    pub const RHO_REF: &str = "n_e m_e / alpha";
    pub const EXPONENT: &str = "slope of log|value| against log(cutoff)";
    pub const DELTA_M: &str = "dm = (8 alpha m/(3 pi)) ln(1 + hbar Lambda/(2 m c0))";
    pub const DELTA_M_LIMIT: &str = "dm(2 Lambda) - dm(Lambda) -> (8 alpha m/(3 pi)) ln 2";
    pub const REDUCED_MASS: &str = "d(1/mu) = -dm1/m1^2 - dm2/m2^2";
    pub const ABRAHAM: &str = "P_A = eps0 alpha(0) B0 x E0";
    pub const CASIMIR: &str = "(-kappa1 + kappa2) alpha^2 P_A";
    pub const MASS_FACTOR: &str = "E0/(M c0^2)";
    pub const KINETIC: &str = "(8/3 - 5/3)(E0/(M c0^2)) Q0";
    pub const TRANSVERSE: &str = "alpha |E0/(M c0^2)| |Q0| + alpha^3 |P_A| (bound)";
    pub const MAGNETIC_REL: &str = "alpha^2 (m_e/M) |P_A| (bound)";
}

#[derive(Debug, Default)]
pub struct Outcome {
    pub results: Map<String, Value>,
    pub rows: Vec<Row>,
    pub provenance: Vec<String>,
    /// False when a check-style command found failures.
    pub success: bool,
}

impl Outcome {
    fn new() -> Self {
        Self {
            success: true,
            ..Self::default()
        }
    }

    fn cite(&mut self, formula: &str) {
        if !self.provenance.iter().any(|p| p == formula) {
            self.provenance.push(formula.to_string());
        }
    }

    fn row(&mut self, quantity: &str, value: f64, error: Option<f64>, formula: &str) {
        self.cite(formula);
        self.rows.push(Row::new(quantity, value, error, formula));
    }

    fn put(&mut self, key: &str, value: Value) {
        self.results.insert(key.to_string(), value);
    }
}

pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Kappas(a) => kappas(a),
        Command::Polarizability(a) => polarizability(a),
        Command::Bethe(a) => bethe(a),
        Command::Continuum(a) => continuum(a),
        Command::Renorm(a) => renorm(a),
        Command::RhoC(a) => rho_c(a),
        Command::Budget(a) => budget(a),
        Command::Verify(_) => verify::run(),
    }
}

fn sum_json(r: &SpectralSumResult, trace: bool) -> Value {
    let mut v = json!({
        "value": r.value,
        "error_bound": r.error_bound,
        "tail_estimate": r.tail_estimate,
        "truncated_sum": r.truncated_sum(),
        "n_max": r.n_max,
        "tail_model": r.tail_model,
    });
    if trace {
        v["partial_sums"] = json!(r.partial_sums);
    }
    v
}

fn continuum_json(r: &ContinuumResult) -> Value {
    json!({ "value": r.value, "y_min": r.y_min, "estimated_error": r.estimated_error })
}

fn kappas_json(k: &Kappas) -> Value {
    json!({ "kappa1": k.kappa1, "kappa2": k.kappa2, "net": k.net() })
}

fn kappas(a: &KappasArgs) -> Result<Outcome> {
    let sums = SpectralSums::compute(a.n_max)?;
    let k1 = sums.kappa1(a.n_max, a.tail)?;
    let k2 = sums.kappa2(a.n_max, a.tail)?;
    let spec = a.quadrature.spec();
    let c1 = kappa1_continuum(a.ymin, &spec)?;
    let c2 = kappa2_continuum(a.ymin, &spec)?;
    let totals = Kappas::from_components(k1.value, c1.value, k2.value, c2.value);
    let adopted = Kappas::adopted();
    let alpha = constants().fine_structure_alpha;

    let mut out = Outcome::new();
    out.put("kappa1_discrete", sum_json(&k1, a.trace));
    out.put("kappa2_discrete", sum_json(&k2, a.trace));
    out.put("kappa1_continuum", continuum_json(&c1));
    out.put("kappa2_continuum", continuum_json(&c2));
    out.put("totals", kappas_json(&totals));
    out.put("adopted", kappas_json(&adopted));
    out.put(
        "relative_shift",
        json!({ "computed": totals.net() * alpha * alpha, "adopted": adopted.net() * alpha * alpha }),
    );

    out.row("kappa1_discrete", k1.value, Some(k1.error_bound), formula::KAPPA1_D);
    out.row("kappa2_discrete", k2.value, Some(k2.error_bound), formula::KAPPA2_D);
    out.row(
        "kappa1_continuum",
        c1.value,
        Some(c1.estimated_error),
        formula::KAPPA1_C,
    );
    out.row(
        "kappa2_continuum",
        c2.value,
        Some(c2.estimated_error),
        formula::KAPPA2_C,
    );
    let t_err1 = k1.error_bound + c1.estimated_error;
    let t_err2 = k2.error_bound + c2.estimated_error;
    out.row("kappa1_total", totals.kappa1, Some(t_err1), formula::TOTAL);
    out.row("kappa2_total", totals.kappa2, Some(t_err2), formula::TOTAL);
    out.row("net_total", totals.net(), Some(t_err1 + t_err2), formula::NET);
    out.row("kappa1_adopted", adopted.kappa1, None, formula::ADOPTED);
    out.row("kappa2_adopted", adopted.kappa2, None, formula::ADOPTED);
    out.row("net_adopted", adopted.net(), None, formula::NET);
    out.row(
        "relative_shift_adopted",
        adopted.net() * alpha * alpha,
        None,
        formula::NET,
    );
    Ok(out)
}

fn polarizability(a: &PolarizabilityArgs) -> Result<Outcome> {
    let sums = SpectralSums::compute(a.n_max)?;
    let p = sums.polarizability(a.n_max, a.tail)?;
    let f = sums.oscillator_sum(a.n_max, a.tail)?;
    let f_max_partial = f.partial_sums.iter().map(|&(_, s)| s).fold(0.0, f64::max);
    let exact = casimir_core::budget::EXACT_POLARIZABILITY_AU;

    let mut out = Outcome::new();
    out.put("polarizability_discrete", sum_json(&p, a.trace));
    out.put("oscillator_sum", sum_json(&f, a.trace));
    out.put("polarizability_exact", json!(exact));
    out.put("continuum_remainder", json!(exact - p.value));
    out.put("oscillator_max_partial_sum", json!(f_max_partial));

    out.row("polarizability_discrete", p.value, Some(p.error_bound), formula::ALPHA0);
    out.row("polarizability_exact", exact, None, formula::ALPHA0_EXACT);
    out.row(
        "continuum_remainder",
        exact - p.value,
        Some(p.error_bound),
        formula::ALPHA0_EXACT,
    );
    out.row("oscillator_sum", f.value, Some(f.error_bound), formula::OSCILLATOR);
    Ok(out)
}

fn bethe(a: &BetheArgs) -> Result<Outcome> {
    let sums = SpectralSums::compute(a.n_max)?;
    let s = sums.bethe(a.n_max, a.tail)?;
    let n = normalization_constant(a.log_value, s.value);
    let n_err = normalization_constant(a.log_value, s.error_bound).abs();

    let mut out = Outcome::new();
    out.put("bethe_sum", sum_json(&s, a.trace));
    out.put(
        "normalization_coefficient",
        json!({ "value": n, "error_bound": n_err, "log_value": a.log_value }),
    );
    out.row("bethe_sum", s.value, Some(s.error_bound), formula::BETHE);
    out.row("normalization_coefficient", n, Some(n_err), formula::NORMALIZATION);
    Ok(out)
}

fn continuum(a: &ContinuumArgs) -> Result<Outcome> {
    let spec = a.quadrature.spec();
    let which: &[(Kappa, &str, &str)] = match a.kappa {
        KappaChoice::Kappa1 => &[(Kappa::Kappa1, "kappa1", formula::KAPPA1_C)],
        KappaChoice::Kappa2 => &[(Kappa::Kappa2, "kappa2", formula::KAPPA2_C)],
        KappaChoice::Both => &[
            (Kappa::Kappa1, "kappa1", formula::KAPPA1_C),
            (Kappa::Kappa2, "kappa2", formula::KAPPA2_C),
        ],
    };
    let mut out = Outcome::new();
    for &(kappa, name, f) in which {
        let rows = ymin_sensitivity(kappa, &a.ymin_grid, &spec)?;
        out.put(name, Value::Array(rows.iter().map(continuum_json).collect()));
        for r in &rows {
            out.row(
                &format!("{name}_continuum[y_min={}]", r.y_min),
                r.value,
                Some(r.estimated_error),
                f,
            );
        }
    }
    Ok(out)
}

fn renorm(a: &RenormArgs) -> Result<Outcome> {
    let c = constants();
    let ctx = UnitContext::atomic(c.fine_structure_alpha);
    // ħΛ/(m c₀) = ratio  ⇒  Λ = ratio · m c₀ / ħ
    let lambda = |ratio: f64| ratio * a.mass * ctx.c0 / ctx.hbar;
    let limit = delta_mass_doubling_limit(a.mass, &ctx);
    let mut out = Outcome::new();
    let mut table = Vec::new();
    for &ratio in &a.cutoffs {
        let l = lambda(ratio);
        let dm = delta_mass(a.mass, l, MassRoute::CrossChecked, &ctx)?;
        let quad = delta_mass(a.mass, l, MassRoute::Quadrature, &ctx)?;
        let doubled = delta_mass(a.mass, 2.0 * l, MassRoute::CrossChecked, &ctx)? - dm;
        table.push(json!({
            "cutoff_ratio": ratio,
            "delta_mass": dm,
            "delta_mass_quadrature": quad,
            "doubling_difference": doubled,
            "doubling_relative_to_limit": doubled / limit - 1.0,
        }));
        out.row(
            &format!("delta_mass[hbar*Lambda/(m*c0)={ratio}]"),
            dm,
            Some((dm - quad).abs()),
            formula::DELTA_M,
        );
    }
    let grid: Vec<f64> = a.cutoffs.iter().map(|&r| lambda(r)).collect();
    let exponent = delta_mass_divergence_exponent(a.mass, &grid, &ctx)?;

    let h = AtomicParams::hydrogen();
    let top = *grid.last().expect("validated non-empty");
    let record = mass_renormalization(&h, top, MassRoute::CrossChecked)?;
    let two_sided = reduced_mass_shift_two_sided(&h, record.delta_m1, record.delta_m2)?;

    out.put("mass", json!(a.mass));
    out.put("delta_mass", Value::Array(table));
    out.put("doubling_limit", json!(limit));
    out.put("divergence_exponent", json!(exponent));
    out.put(
        "hydrogen",
        json!({
            "renormalization": record,
            "inverse_reduced_mass_two_sided": two_sided,
        }),
    );
    out.row("doubling_limit", limit, None, formula::DELTA_M_LIMIT);
    out.row("divergence_exponent", exponent, None, formula::EXPONENT);
    out.row(
        "hydrogen_delta_inverse_reduced_mass",
        record.delta_inverse_reduced_mass,
        None,
        formula::REDUCED_MASS,
    );
    out.row(
        "hydrogen_delta_inverse_reduced_mass_two_sided",
        two_sided,
        None,
        formula::REDUCED_MASS,
    );
    Ok(out)
}

fn rho_c(a: &RhoCArgs) -> Result<Outcome> {
    let c = constants();
    let model = match a.model {
        ModelChoice::Dispersionless => DispersionModel::Dispersionless { epsilon_r: a.epsilon_r },
        ModelChoice::FreeElectron => DispersionModel::FreeElectron { n_e: a.n_e },
    };
    let cutoff = match (a.omega_max, a.l_min) {
        (Some(w), _) => CutoffScheme::Frequency { omega_max: w },
        (None, Some(l)) => CutoffScheme::Length { l_min: l },
        (None, None) => CutoffScheme::Length {
            l_min: c.classical_electron_radius(),
        },
    };
    let r = casimir_mass_density(&model, &cutoff, c)?;
    let grid = geometric_grid(r.omega_max / 128.0, 2.0, 8);
    let exponent = divergence_exponent(&model, &grid, c)?;

    let mut out = Outcome::new();
    out.put("model", json!(model));
    out.put("model_description", json!(model.description()));
    out.put("cutoff", json!(cutoff));
    out.put("omega_max", json!(r.omega_max));
    out.put("rho_c", json!(r.value));
    out.put("rho_c_quadrature", json!(r.quadrature));
    out.put("below_plasma_warning", json!(r.below_plasma));
    out.put("divergence_exponent", json!(exponent));
    out.row("rho_c", r.value, Some((r.value - r.quadrature).abs()), formula::RHO_C);
    out.row("omega_max", r.omega_max, None, formula::RHO_C);
    out.row("divergence_exponent", exponent, None, formula::EXPONENT);
    if let DispersionModel::FreeElectron { n_e } = model {
        let reference = n_e * c.electron_mass / c.fine_structure_alpha;
        out.put("reference_density", json!(reference));
        out.put("ratio_to_reference", json!(r.value / reference));
        out.row("reference_density", reference, None, formula::RHO_REF);
        out.row("ratio_to_reference", r.value / reference, None, formula::RHO_REF);
    }
    Ok(out)
}

fn budget(a: &BudgetArgs) -> Result<Outcome> {
    let c = constants();
    let fields = FieldConfiguration::new(a.e0, a.b0, a.q0);
    let mut out = Outcome::new();
    let choice = match a.polarizability {
        PolarizabilityArg::Exact => PolarizabilityChoice::Exact,
        PolarizabilityArg::RelativisticCorrected => PolarizabilityChoice::RelativisticCorrected,
        PolarizabilityArg::ComputedDiscrete => {
            let p = SpectralSums::compute(a.n_max)?.polarizability(a.n_max, casimir_core::Tail::On)?;
            out.put("computed_polarizability", sum_json(&p, false));
            out.cite(formula::ALPHA0);
            PolarizabilityChoice::ComputedDiscrete { value_au: p.value }
        }
    };
    let kappas = Kappas {
        kappa1: a.kappa1,
        kappa2: a.kappa2,
    };
    let b = assemble_budget(&fields, &AtomicParams::hydrogen(), kappas, choice, c)?;

    for (name, v, f) in [
        ("abraham", b.abraham, formula::ABRAHAM),
        ("casimir_correction", b.casimir_correction, formula::CASIMIR),
        ("kinetic_mass_correction", b.kinetic_mass_correction, formula::KINETIC),
    ] {
        for (axis, x) in ["x", "y", "z"].iter().zip(v.iter()) {
            out.row(&format!("{name}.{axis}"), *x, None, f);
        }
    }
    out.row("casimir_relative_shift", b.casimir_relative_shift, None, formula::NET);
    out.row("kinetic_mass_factor", b.kinetic_mass_factor, None, formula::MASS_FACTOR);
    out.row(
        "magnetic_relativistic_bound",
        b.magnetic_relativistic_bound,
        None,
        formula::MAGNETIC_REL,
    );
    out.row("transverse_bound", b.transverse_bound, None, formula::TRANSVERSE);
    out.put("budget", serde_json::to_value(&b)?);
    Ok(out)
}
