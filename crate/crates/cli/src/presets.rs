//! Named parameter sets `fig1` to `fig16`.
//!
//! Each preset is a config layer plus the command it is meant for. Channel
//! quality triples are standard deviations `sd,sr,rd`.

use anyhow::{bail, Result};

use crate::config::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetCommand {
    Sweep,
    BitEnergy,
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub command: PresetCommand,
    pub description: &'static str,
    pub text: &'static str,
}

const TRIPLES: &str = "1,2,1;1,4,4;1,10,2";

macro_rules! text {
    ($($line:expr),* $(,)?) => { concat!($($line, "\n"),*) };
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig1",
        command: PresetCommand::Sweep,
        description: "optimal relay training fraction vs sigma_rd for Pr in {1, 10, 100}",
        text: text!(
            "scheme = af_nonoverlapped",
            "quantity = delta_r_opt",
            "m = 50", "alpha = 0.5", "ps = 1", "sigma = 1,10,1",
            "x = sigma_rd", "x_values = log:0.1:100:31",
            "y = pr", "y_values = 1,10,100",
            "samples = 20000",
        ),
    },
    Preset {
        name: "fig2",
        command: PresetCommand::Sweep,
        description: "overlapped AF rate over (delta_s, delta_r) at Ps = Pr = 50",
        text: text!(
            "scheme = af_overlapped", "m = 50", "alpha = 0.5", "sigma = 1,2,1", "ps = 50", "pr = 50",
            "x = delta_s", "x_values = step:0.02:0.98:0.04",
            "y = delta_r", "y_values = step:0.02:0.98:0.04",
            "samples = 20000",
        ),
    },
    Preset {
        name: "fig3",
        command: PresetCommand::Sweep,
        description: "overlapped AF rate over (delta_s, delta_r) at Ps = Pr = 0.5",
        text: text!(
            "scheme = af_overlapped", "m = 50", "alpha = 0.5", "sigma = 1,2,1", "ps = 0.5", "pr = 0.5",
            "x = delta_s", "x_values = step:0.02:0.98:0.04",
            "y = delta_r", "y_values = step:0.02:0.98:0.04",
            "samples = 20000",
        ),
    },
    Preset {
        name: "fig4",
        command: PresetCommand::Sweep,
        description: "overlapped AF rate vs alpha at Ps = Pr = 50",
        text: text!(
            "scheme = af_overlapped", "m = 50", "delta = 0.1", "ps = 50", "pr = 50",
            "x = alpha", "x_values = lin:0.01:0.5:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig5",
        command: PresetCommand::Sweep,
        description: "overlapped repetition DF rate vs alpha at Ps = Pr = 50",
        text: text!(
            "scheme = df_repetition_overlapped", "m = 50", "delta = 0.1", "ps = 50", "pr = 50",
            "x = alpha", "x_values = lin:0.01:0.5:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig6",
        command: PresetCommand::Sweep,
        description: "overlapped AF rate vs alpha at Ps = Pr = 0.5",
        text: text!(
            "scheme = af_overlapped", "m = 50", "delta = 0.1", "ps = 0.5", "pr = 0.5",
            "x = alpha", "x_values = lin:0.01:0.5:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig7",
        command: PresetCommand::Sweep,
        description: "overlapped repetition DF rate vs alpha at Ps = Pr = 0.5",
        text: text!(
            "scheme = df_repetition_overlapped", "m = 50", "delta = 0.1", "ps = 0.5", "pr = 0.5",
            "x = alpha", "x_values = lin:0.01:0.5:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig8",
        command: PresetCommand::Sweep,
        description: "parallel-coding DF rate vs alpha at Ps = Pr = 0.5",
        text: text!(
            "scheme = df_parallel", "m = 50", "delta = 0.1", "ps = 0.5", "pr = 0.5",
            "x = alpha", "x_values = lin:0.01:0.99:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig9",
        command: PresetCommand::Sweep,
        description: "overlapped AF rate vs theta at P = 100, with direct transmission",
        text: text!(
            "scheme = af_overlapped;direct", "m = 50", "delta = 0.1", "alpha = 0.5", "p = 100",
            "x = theta", "x_values = lin:0.01:0.99:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig10",
        command: PresetCommand::Sweep,
        description: "parallel-coding DF rate vs theta at P = 100, with direct transmission",
        text: text!(
            "scheme = df_parallel;direct", "m = 50", "delta = 0.1", "alpha = 0.5", "p = 100",
            "x = theta", "x_values = lin:0.01:0.99:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig11",
        command: PresetCommand::Sweep,
        description: "non-overlapped AF rate vs theta at P = 1, with direct transmission",
        text: text!(
            "scheme = af_nonoverlapped;direct", "m = 50", "delta = 0.1", "alpha = 0.5", "p = 1",
            "x = theta", "x_values = lin:0.01:0.99:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig12",
        command: PresetCommand::Sweep,
        description: "non-overlapped repetition DF rate vs theta at P = 1, with direct transmission",
        text: text!(
            "scheme = df_repetition_nonoverlapped;direct", "m = 50", "delta = 0.1", "alpha = 0.5", "p = 1",
            "x = theta", "x_values = lin:0.01:0.99:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig13",
        command: PresetCommand::Sweep,
        description: "parallel-coding DF rate vs theta at P = 1, with direct transmission",
        text: text!(
            "scheme = df_parallel;direct", "m = 50", "delta = 0.1", "alpha = 0.5", "p = 1",
            "x = theta", "x_values = lin:0.01:0.99:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig14",
        command: PresetCommand::Sweep,
        description: "overlapped AF rate vs theta at P = 1, with direct transmission",
        text: text!(
            "scheme = af_overlapped;direct", "m = 50", "delta = 0.1", "alpha = 0.5", "p = 1",
            "x = theta", "x_values = lin:0.01:0.99:50",
            "y = sigma",
        ),
    },
    Preset {
        name: "fig15",
        command: PresetCommand::BitEnergy,
        description: "non-overlapped AF bit energy vs SNR for m in {20, 50, 100}",
        text: text!(
            "scheme = af_nonoverlapped", "sigma = 1,4,4", "delta = 0.1", "alpha = 0.5", "theta = 0.6",
            "m_values = 20,50,100", "snr_values = log:1e-4:100:41",
        ),
    },
    Preset {
        name: "fig16",
        command: PresetCommand::BitEnergy,
        description: "minimum bit energy vs m for every scheme",
        text: text!(
            "scheme = af_nonoverlapped;af_overlapped;df_repetition_nonoverlapped;df_repetition_overlapped;df_parallel",
            "sigma = 1,4,4", "delta = 0.1", "alpha = 0.5", "theta = 0.6",
            "m_values = 20,50,100,200", "minimum = true", "bracket = 1e-3:100",
        ),
    },
];

pub fn find(name: &str) -> Result<&'static Preset> {
    match PRESETS.iter().find(|p| p.name == name) {
        Some(p) => Ok(p),
        None => bail!(
            "unknown preset {name:?}; available: {}",
            PRESETS
                .iter()
                .map(|p| p.name)
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}

impl Preset {
    pub fn config(&self) -> Result<Config> {
        let mut cfg = Config::parse(self.text)?;
        if cfg.get("y") == Some("sigma") && !cfg.contains("y_values") {
            cfg.set("y_values", TRIPLES)?;
        }
        Ok(cfg)
    }
}
