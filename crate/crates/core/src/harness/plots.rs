//! gnuplot scripts for the result CSVs. Nothing is plotted in-process.

use std::fs;
use std::path::{Path, PathBuf};

use super::config::Scenario;
use crate::error::{Error, Result};

pub const VERIFY_CSV: &str = "verify_perr.csv";
pub const SWEEP_CSV: &str = "bounds_sweep.csv";
pub const ACCURACY_VS_K_CSV: &str = "accuracy_vs_k.csv";

fn rounds_csv(s: Scenario) -> String {
    format!("rounds_{}.csv", s.name())
}

const ALL_ROUND_SCENARIOS: [Scenario; 4] = [
    Scenario::Noiseless,
    Scenario::Awgn,
    Scenario::FadingPerfectCsi,
    Scenario::FadingImperfectCsi,
];

fn header(output: &str, xlabel: &str, ylabel: &str) -> String {
    format!(
        "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 800,560\n\
         set output '{output}'\nset grid\nset xlabel '{xlabel}'\nset ylabel '{ylabel}'\n"
    )
}

fn rounds_script(dir: &Path, column: &str, ylabel: &str, output: &str) -> Option<String> {
    let present: Vec<Scenario> = ALL_ROUND_SCENARIOS
        .into_iter()
        .filter(|s| dir.join(rounds_csv(*s)).is_file())
        .collect();
    if present.is_empty() {
        return None;
    }
    let curves: Vec<String> = present
        .iter()
        .map(|s| format!("'{}' using 'round':'{column}' with lines title '{}'", rounds_csv(*s), s.name()))
        .collect();
    Some(header(output, "communication round", ylabel) + "plot " + &curves.join(", \\\n     ") + "\n")
}

fn accuracy_vs_k_script() -> String {
    let curves: Vec<String> = Scenario::CHANNELS
        .into_iter()
        .chain([Scenario::Noiseless])
        .map(|s| {
            format!(
                "'{ACCURACY_VS_K_CSV}' using (strcol('scenario') eq '{0}' ? column('K') : NaN):'final_accuracy' \
                 with linespoints title '{0}'",
                s.name()
            )
        })
        .collect();
    header("accuracy_vs_k.png", "devices K", "test accuracy")
        + "set logscale x\n"
        + "plot "
        + &curves.join(", \\\n     ")
        + "\n"
}

fn verify_script() -> String {
    header("verify_perr.png", "grid point", "sign-error probability")
        + "set logscale y\n"
        + &format!(
            "plot '{VERIFY_CSV}' using 0:'p_bound' with points pt 6 title 'bound', \\\n     \
             '{VERIFY_CSV}' using 0:'p_emp' with points pt 7 title 'empirical'\n"
        )
}

fn sweep_script() -> String {
    let curves: Vec<String> = ["awgn", "fading", "imperfect"]
        .iter()
        .map(|s| {
            format!(
                "'{SWEEP_CSV}' using (strcol('scenario') eq '{s}' && column('rho_db') == 10 ? column('K') : NaN):'a' \
                 with points title '{s}'"
            )
        })
        .collect();
    header("bounds_sweep.png", "devices K", "scaling factor a")
        + "set logscale x\n"
        + "plot "
        + &curves.join(", \\\n     ")
        + "\n"
}

/// Write a script for every result CSV found in `dir`; error if there are none.
pub fn emit_plots(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut scripts: Vec<(&str, String)> = Vec::new();
    if let Some(s) = rounds_script(dir, "accuracy", "test accuracy", "accuracy_vs_round.png") {
        scripts.push(("accuracy_vs_round.gp", s));
    }
    if let Some(s) = rounds_script(dir, "g_l1_timeavg", "time-averaged gradient l1 norm", "gnorm_vs_round.png") {
        scripts.push(("gnorm_vs_round.gp", s));
    }
    if dir.join(ACCURACY_VS_K_CSV).is_file() {
        scripts.push(("accuracy_vs_k.gp", accuracy_vs_k_script()));
    }
    if dir.join(VERIFY_CSV).is_file() {
        scripts.push(("verify_perr.gp", verify_script()));
    }
    if dir.join(SWEEP_CSV).is_file() {
        scripts.push(("bounds_sweep.gp", sweep_script()));
    }
    if scripts.is_empty() {
        let mut expected: Vec<String> = ALL_ROUND_SCENARIOS.into_iter().map(rounds_csv).collect();
        expected.extend([ACCURACY_VS_K_CSV, VERIFY_CSV, SWEEP_CSV].map(String::from));
        return Err(Error::MissingResults {
            dir: dir.to_path_buf(),
            expected,
        });
    }
    scripts
        .into_iter()
        .map(|(name, body)| {
            let path = dir.join(name);
            fs::write(&path, body)?;
            Ok(path)
        })
        .collect()
}
