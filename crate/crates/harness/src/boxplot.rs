//! Long-format per-seed statistics for external box plots.

use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sparsepca::StatsReport;

use crate::error::{io_err, HarnessError, Result};
use crate::experiment::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Macs,
    Macl,
    Rss,
    TotQr,
    TotT,
    TotPt,
}

impl Statistic {
    pub const ALL: [Statistic; 6] = [
        Statistic::Macs,
        Statistic::Macl,
        Statistic::Rss,
        Statistic::TotQr,
        Statistic::TotT,
        Statistic::TotPt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Macs => "macs",
            Statistic::Macl => "macl",
            Statistic::Rss => "rss",
            Statistic::TotQr => "tot_qr",
            Statistic::TotT => "tot_t",
            Statistic::TotPt => "tot_pt",
        }
    }

    pub fn of(self, s: &StatsReport) -> f64 {
        match self {
            Statistic::Macs => s.macs,
            Statistic::Macl => s.macl,
            Statistic::Rss => s.rss,
            Statistic::TotQr => s.tot_qr,
            Statistic::TotT => s.tot_t,
            Statistic::TotPt => s.tot_pt,
        }
    }
}

impl FromStr for Statistic {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Statistic::ALL
            .into_iter()
            .find(|st| st.name() == key || st.name().replace('_', "") == key)
            .ok_or_else(|| HarnessError::InvalidInput(format!("unknown statistic '{s}'")))
    }
}

/// Writes `seed,method,score_mode,statistic,value` rows for every successful
/// record, in record order. Failed runs are left out.
pub fn emit_boxplot_data(records: &[RunRecord], statistic: Statistic, out: impl Write) -> Result<usize> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["seed", "method", "score_mode", "statistic", "value"])?;
    let mut rows = 0;
    for r in records {
        if let Some(stats) = &r.stats {
            w.write_record([
                r.seed.to_string(),
                r.method.to_string(),
                r.score_mode.to_string(),
                statistic.name().to_string(),
                format!("{:.16e}", statistic.of(stats)),
            ])?;
            rows += 1;
        }
    }
    w.flush().map_err(io_err("<csv>"))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_names() {
        assert_eq!("tot_pt".parse::<Statistic>().unwrap(), Statistic::TotPt);
        assert_eq!("TotPT".parse::<Statistic>().unwrap(), Statistic::TotPt);
        assert_eq!("MACS".parse::<Statistic>().unwrap(), Statistic::Macs);
        assert!(matches!(
            "variance".parse::<Statistic>(),
            Err(HarnessError::InvalidInput(_))
        ));
    }
}
