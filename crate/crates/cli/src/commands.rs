use std::fmt::Write as _;

use anyhow::{bail, Result};
use serde::Serialize;
use serde_json::{json, Value};
use symcanon_core::gaussian::{
    attenuator, channel_validity, condense_correlations, normalize_channel, random_valid_channel,
    schmidt_relation_check, squeezing_witness, state_validity, state_validity_with_form, tmss,
    BipartiteCovariance, Validity,
};
use symcanon_core::{
    decompose, invariants, random_gaussian_matrix, random_symplectic, verify_decomposition,
    williamson, CanonicalBlock, CanonicalBlocks, Error, InvariantKind, InvariantSpectrum, Mat,
    MatrixDoc, Tolerances,
};

use crate::args::{Command, Common, GenArgs, GenKind};
use crate::input::{self, Input};
use crate::output::matrix_text;

/// Result of an analysis command: the structured payload and its text form.
pub struct Outcome {
    pub result: Value,
    pub human: String,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

pub fn tolerances(c: &Common) -> Result<Tolerances, Error> {
    let mut t = Tolerances::default();
    if let Some(v) = c.tol {
        t = t.with_residual_tol(v);
    }
    if let Some(v) = c.gap {
        t = t.with_degeneracy_gap(v);
    }
    t.validate()?;
    Ok(t)
}

pub fn analyze(cmd: &Command, c: &Common, tol: &Tolerances, inp: &Input) -> Result<Outcome, Error> {
    let v = &inp.value;
    match cmd {
        Command::Invariants(_) => {
            let spec = invariants(&input::operand(v)?, tol)?;
            Ok(Outcome {
                human: spectrum_text(&spec),
                result: to_value(&spec),
            })
        }
        Command::Decompose(_) => {
            let x = input::operand(v)?;
            let d = decompose(&x, tol, c.seed)?;
            let check = verify_decomposition(&x, &d, tol)?;
            let mut human = blocks_text(&d.blocks);
            writeln!(
                human,
                "S1:\n{}S2:\n{}",
                matrix_text(&d.s1),
                matrix_text(&d.s2)
            )
            .unwrap();
            writeln!(
                human,
                "residuals: reconstruction {:.3e}, S1 {:.3e}, S2 {:.3e}",
                d.recon_residual, d.s1_residual, d.s2_residual
            )
            .unwrap();
            writeln!(human, "independent check: {}", pass(check.verdict)).unwrap();
            Ok(Outcome {
                result: json!({ "decomposition": to_value(&d), "verification": to_value(&check) }),
                human,
            })
        }
        Command::Williamson(_) => {
            let w = williamson(&input::matrix(v)?, tol)?;
            let mut human = String::new();
            writeln!(human, "symplectic eigenvalues: {}", list(&w.nu)).unwrap();
            writeln!(human, "occupations: {}", list(&w.occupations)).unwrap();
            writeln!(
                human,
                "S:\n{}residual: {:.3e}",
                matrix_text(&w.s),
                w.residual
            )
            .unwrap();
            Ok(Outcome {
                result: to_value(&w),
                human,
            })
        }
        Command::Condense(_) => {
            let g = input::bipartite(v)?;
            let out = condense_correlations(&g, tol, c.seed)?;
            // The Schmidt relation only applies to pure states; anything else
            // is reported rather than treated as a failure of the condensation.
            let (schmidt, schmidt_note) = match schmidt_relation_check(&g, tol) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let mut human = blocks_text(&out.blocks);
            writeln!(
                human,
                "condensed correlation block:\n{}",
                matrix_text(&out.g_out.x)
            )
            .unwrap();
            writeln!(
                human,
                "S_A:\n{}S_B:\n{}",
                matrix_text(&out.s_a),
                matrix_text(&out.s_b)
            )
            .unwrap();
            writeln!(
                human,
                "correlation residual: {:.3e}",
                out.correlation_residual
            )
            .unwrap();
            match &schmidt {
                Some(s) => writeln!(
                    human,
                    "pure state: local ν = {}, max Schmidt relation error {:.3e}",
                    list(&s.nu_local),
                    s.max_relative_error
                )
                .unwrap(),
                None => writeln!(
                    human,
                    "Schmidt relation not applicable: {}",
                    schmidt_note.as_deref().unwrap_or("")
                )
                .unwrap(),
            }
            Ok(Outcome {
                result: json!({
                    "condensed": to_value(&out),
                    "schmidt": to_value(&schmidt),
                    "schmidt_note": schmidt_note,
                }),
                human,
            })
        }
        Command::ChannelNormalize(_) => {
            let ch = input::channel(v)?;
            let before = channel_validity(&ch, tol)?;
            let out = normalize_channel(&ch, tol, c.seed)?;
            let after = channel_validity(&out.ch_out, tol)?;
            let mut human = blocks_text(&out.blocks);
            writeln!(
                human,
                "normalized X:\n{}normalized Y:\n{}",
                matrix_text(&out.ch_out.x),
                matrix_text(&out.ch_out.y)
            )
            .unwrap();
            writeln!(
                human,
                "S1:\n{}S2:\n{}",
                matrix_text(&out.s1),
                matrix_text(&out.s2)
            )
            .unwrap();
            writeln!(
                human,
                "validity before {} ({:.3e}), after {} ({:.3e})",
                pass(before.valid),
                before.min_eig,
                pass(after.valid),
                after.min_eig
            )
            .unwrap();
            Ok(Outcome {
                result: json!({
                    "normalized": to_value(&out),
                    "validity_before": to_value(&before),
                    "validity_after": to_value(&after),
                }),
                human,
            })
        }
        Command::ValidateChannel(_) => {
            let ch = input::channel(v)?;
            let val = channel_validity(&ch, tol)?;
            Ok(validity_outcome(val, ch.scale()))
        }
        Command::ValidateState(_) => {
            let (val, scale) = if v.get("rows").is_some() {
                let gamma = input::matrix(v)?;
                let scale = gamma.norm().max(1.0);
                (state_validity(&gamma, tol)?, scale)
            } else {
                let g: BipartiteCovariance = input::bipartite(v)?;
                let full = g.assemble();
                (
                    state_validity_with_form(&full, &g.form(), tol)?,
                    full.norm().max(1.0),
                )
            };
            Ok(validity_outcome(val, scale))
        }
        Command::Witness(_) => {
            let w = squeezing_witness(&input::operand(v)?, tol)?;
            let mut human = spectrum_text(&w.spectrum);
            writeln!(human, "verdict: {:?}", w.verdict).unwrap();
            Ok(Outcome {
                result: to_value(&w),
                human,
            })
        }
        Command::Gen(_) => unreachable!("gen has no input document"),
    }
}

fn validity_outcome(val: Validity, scale: f64) -> Outcome {
    Outcome {
        human: format!(
            "{} (minimal eigenvalue {:.6e}, scale {:.3e})\n",
            if val.valid { "valid" } else { "invalid" },
            val.min_eig,
            scale
        ),
        result: json!({ "validity": to_value(&val), "scale": scale }),
    }
}

/// Builds the raw document requested by `gen`.
pub fn generate(g: &GenArgs) -> Result<Value> {
    if g.n == 0 {
        bail!(Error::DimensionError("--n must be positive".into()));
    }
    let doc = match g.kind {
        GenKind::Identity => to_value(&MatrixDoc::from_mat(&Mat::identity(2 * g.n, 2 * g.n))),
        GenKind::RandomX => to_value(&MatrixDoc::from_mat(&random_gaussian_matrix(
            2 * g.n,
            2 * g.n,
            g.seed,
        ))),
        GenKind::RandomSymplectic => {
            to_value(&MatrixDoc::from_mat(&random_symplectic(g.n, g.seed)))
        }
        GenKind::Tmss => {
            let rs = match g.r.len() {
                0 => bail!("--kind tmss needs --r"),
                1 => vec![g.r[0]; g.n],
                _ => g.r.clone(),
            };
            to_value(&tmss(&rs)?)
        }
        GenKind::Attenuator => {
            let Some(eta) = g.eta else {
                bail!("--kind attenuator needs --eta");
            };
            to_value(&attenuator(g.n, eta)?)
        }
        GenKind::Passive => to_value(&random_valid_channel(g.n, g.env_modes, false, g.seed)?),
    };
    Ok(doc)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|x| format!("{x:.10}")).collect();
    format!("[{}]", items.join(", "))
}

fn spectrum_text(spec: &InvariantSpectrum) -> String {
    let mut out = format!("invariants of a {}-mode matrix:\n", spec.n);
    for v in &spec.values {
        match v.kind {
            InvariantKind::Real => writeln!(out, "  {:.12}", v.re).unwrap(),
            InvariantKind::ComplexPair => writeln!(out, "  {:.12} ± {:.12}i", v.re, v.im).unwrap(),
        }
    }
    writeln!(out, "pairing residual: {:.3e}", spec.pairing_residual).unwrap();
    if spec.has_zero {
        out.push_str("note: a vanishing invariant (singular input)\n");
    }
    out
}

fn blocks_text(b: &CanonicalBlocks) -> String {
    let mut out = String::from("canonical blocks of J:\n");
    for block in &b.blocks {
        match *block {
            CanonicalBlock::Real { lambda } => writeln!(out, "  [{lambda:.12}]").unwrap(),
            CanonicalBlock::ComplexPair { a, b } => {
                writeln!(out, "  [[{a:.12}, {b:.12}], [{:.12}, {a:.12}]]", -b).unwrap()
            }
        }
    }
    out
}
