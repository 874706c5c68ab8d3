use std::time::Instant;

use trigbeta::corpus::{load_corpus, run_corpus, ReportFormat};

use crate::{exit, CliConfig, Format, Outcome};

pub fn cmd_verify(cfg: &CliConfig) -> Outcome {
    let entries = match load_corpus(cfg.corpus_path.as_deref()) {
        Ok(e) => e,
        Err(e) => return Outcome::usage_error(format!("error: {e}\n")),
    };
    let start = Instant::now();
    let report = run_corpus(&entries, cfg.rel_tol, cfg.jobs);
    let format = match cfg.format {
        Format::Text => ReportFormat::Text,
        Format::Json => ReportFormat::Json,
        Format::Markdown => ReportFormat::Markdown,
    };
    let code = if report.summary.fail == 0 { exit::OK } else { exit::DISAGREE };
    Outcome {
        code,
        stdout: report.render(format),
        stderr: format!(
            "verified {} rows in {:.1} ms (jobs {})\n",
            report.summary.rows,
            start.elapsed().as_secs_f64() * 1e3,
            cfg.jobs
        ),
    }
}
