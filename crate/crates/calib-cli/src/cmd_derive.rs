//! `calib derive`: print the mechanically derived evolution equations of a
//! system and diff them against the built-in transcription.

use std::fs;
use std::path::PathBuf;

use calib_core::symbolic::{derive_rhs, parse_polynomial, vector_field_to_text, ChiTerm};
use calib_core::systems::SystemKind;
use calib_core::{ActionSpec, VarTable};
use clap::Args;
use serde::Deserialize;

use crate::manifest::ManifestBuilder;
use crate::Failure;

#[derive(Debug, Args)]
pub struct DeriveArgs {
    /// Built-in system name (assoc-u1-cone, assoc-r-u1sq, coassoc-u1sq-cone,
    /// cayley-su2, cayley-u1sq-cone)
    #[arg(
        value_name = "SYSTEM",
        required_unless_present = "action",
        conflicts_with = "action"
    )]
    pub system: Option<String>,
    /// Derive from an action description file instead of a built-in system
    #[arg(long, value_name = "FILE")]
    pub action: Option<PathBuf>,
    /// Directory for rhs.txt and the run manifest
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Seed recorded in the manifest (derivation itself is deterministic)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ActionFile {
    name: String,
    form: FormName,
    #[serde(default)]
    parameters: Vec<String>,
    generators: Vec<Vec<String>>,
    chi: Vec<ChiFile>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum FormName {
    G2,
    G2Star,
    Spin7,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChiFile {
    coeff: String,
    generators: Vec<usize>,
}

fn parse_action(bytes: &[u8]) -> Result<ActionSpec, Failure> {
    let file: ActionFile = serde_json::from_slice(bytes)
        .map_err(|e| Failure::invalid(format!("invalid action: {e}")))?;
    let form = match file.form {
        FormName::G2 => calib_core::forms::g2_form(),
        FormName::G2Star => calib_core::forms::g2_star_form(),
        FormName::Spin7 => calib_core::forms::spin7_form(),
    };
    let params: Vec<&str> = file.parameters.iter().map(String::as_str).collect();
    let vars = VarTable::new(&params, form.ambient_dim());
    let poly = |text: &str| {
        parse_polynomial(text, &vars)
            .map_err(|e| Failure::invalid(format!("invalid action: '{text}': {e}")))
    };
    let mut generators = Vec::with_capacity(file.generators.len());
    for g in &file.generators {
        let field: Result<Vec<_>, _> = g.iter().map(|c| poly(c)).collect();
        generators.push(field?);
    }
    let mut chi = Vec::with_capacity(file.chi.len());
    for term in &file.chi {
        chi.push(ChiTerm::new(poly(&term.coeff)?, term.generators.clone()));
    }
    Ok(ActionSpec {
        name: file.name,
        vars,
        form,
        generators,
        chi,
    })
}

pub fn run(args: &DeriveArgs) -> Result<(), Failure> {
    let (input_bytes, action, reference) = match (&args.system, &args.action) {
        (Some(name), None) => {
            let kind = SystemKind::from_name(name)
                .map_err(|_| Failure::invalid(format!("unknown system '{name}'")))?;
            (name.clone().into_bytes(), kind.action(), Some(kind))
        }
        (None, Some(path)) => {
            let bytes = fs::read(path)
                .map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))?;
            let action = parse_action(&bytes)?;
            (bytes, action, None)
        }
        _ => unreachable!("clap enforces exactly one target"),
    };

    let derived = derive_rhs(&action)
        .map_err(|e| Failure::invalid(format!("invalid action: {e}")))?;
    let mut body = format!(
        "{}\n{}\n",
        action.name,
        vector_field_to_text(&derived, &action.vars)
    );

    let (status, matches) = match reference {
        Some(kind) => {
            let report = kind
                .derivation_report()
                .map_err(|e| Failure::numerical(e.to_string()))?;
            if report.is_match() {
                (
                    "diff against built-in transcription: all components match".to_string(),
                    true,
                )
            } else {
                (
                    format!(
                        "diff against built-in transcription:\n{}",
                        report.describe(&kind.vars())
                    ),
                    false,
                )
            }
        }
        None => ("no built-in reference; derivation printed only".to_string(), true),
    };
    body.push_str(&status);
    body.push('\n');
    print!("{body}");

    if let Some(out) = &args.out {
        fs::create_dir_all(out)
            .map_err(|e| Failure::invalid(format!("cannot create {}: {e}", out.display())))?;
        let mut manifest =
            ManifestBuilder::new("derive", args.action.as_deref(), &input_bytes, args.seed);
        let rhs_path = out.join("rhs.txt");
        fs::write(&rhs_path, &body).map_err(Failure::io)?;
        manifest.record(&rhs_path);
        manifest.write(out).map_err(Failure::io)?;
    }

    if matches {
        Ok(())
    } else {
        Err(Failure::numerical("derived field differs from the transcription"))
    }
}
