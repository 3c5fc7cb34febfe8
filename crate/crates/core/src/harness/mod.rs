//! Training runs, the multi-spectrum benchmark, and trace replay.
//!
//! Runs are embarrassingly parallel: every (family × spectrum) pair gets
//! its own environment, networks, buffer, and RNG streams derived from
//! the master seed by run index, so serial and parallel execution produce
//! identical reports.

pub mod report;
mod stats;

pub use stats::Stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env::{reward_fn, Environment, EpisodeConfig};
use crate::error::{Error, Result};
use crate::filterfn::{self, PulseSequence};
use crate::qnet::{
    backward_and_step, select_action, Adam, AgentHyperparams, EpsilonSchedule, Experience,
    QNetwork, ReplayBuffer,
};
use crate::rng::{self, stream};
use crate::sequences::{cdd_order_for_pulses, make_sequence, FamilyKind, SequenceFamily};
use crate::spectra::{generate_spectrum, NoiseSpectrum};
use crate::thompson::{apply_map, format_action_word, generator, ActionId};

/// Full benchmark specification; serialized into every artifact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_pulses: usize,
    pub total_time: f64,
    pub n_spectra: usize,
    pub n_lorentzians: usize,
    pub norm_target: f64,
    pub families: Vec<FamilyKind>,
    pub episodes: usize,
    pub steps_per_episode: usize,
    pub agent: AgentHyperparams,
    pub master_seed: u64,
    /// Worker threads; 0 means one per core. Scheduling width never
    /// affects results, so it is kept out of the serialized config echo.
    #[serde(default, skip_serializing)]
    pub jobs: usize,
}

impl RunConfig {
    /// Laptop-sized configuration: 10 spectra, 1500 episodes, CPMG start.
    pub fn desk(master_seed: u64) -> Self {
        Self {
            n_pulses: 10,
            total_time: 1.0,
            n_spectra: 10,
            n_lorentzians: 5,
            norm_target: 10.0,
            families: vec![FamilyKind::Cpmg],
            episodes: 1500,
            steps_per_episode: 32,
            agent: AgentHyperparams::default(),
            master_seed,
            jobs: 0,
        }
    }

    /// Full-scale configuration: 200 spectra, 5000 episodes, all five
    /// initial families.
    pub fn paper(master_seed: u64) -> Self {
        Self {
            n_spectra: 200,
            episodes: 5000,
            families: FamilyKind::ALL.to_vec(),
            ..Self::desk(master_seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.episodes == 0 || self.steps_per_episode == 0 || self.n_spectra == 0 {
            return Err(Error::Config("episodes, steps and spectra must be positive".into()));
        }
        if self.families.is_empty() {
            return Err(Error::Config("need at least one initial family".into()));
        }
        if self.n_pulses == 0 {
            return Err(Error::Config("n_pulses must be positive".into()));
        }
        if !(self.total_time > 0.0) {
            return Err(Error::Config("total_time must be positive".into()));
        }
        self.agent.validate()
    }

    pub fn spectrum_seed(&self, spectrum_index: usize) -> u64 {
        rng::derive_seed(self.master_seed, spectrum_index as u64, stream::SPECTRUM)
    }

    fn run_seed(&self, run_index: usize) -> u64 {
        rng::derive_seed(self.master_seed, run_index as u64, stream::RUN)
    }

    fn prdd_seed(&self, spectrum_index: usize) -> u64 {
        rng::derive_seed(self.master_seed, spectrum_index as u64, stream::PRDD)
    }

    /// The initial sequence for one run of this benchmark.
    pub fn initial_sequence(
        &self,
        family: FamilyKind,
        spectrum_index: usize,
    ) -> Result<PulseSequence> {
        let mut spec = SequenceFamily::new(family, self.n_pulses, self.total_time);
        match family {
            FamilyKind::Cdd => {
                let order = cdd_order_for_pulses(self.n_pulses).ok_or_else(|| {
                    Error::InvalidFamily(format!(
                        "no concatenation order yields {} pulses",
                        self.n_pulses
                    ))
                })?;
                spec = spec.with_cdd_order(order);
            }
            FamilyKind::Prdd => {
                spec = spec.with_seed(self.prdd_seed(spectrum_index));
            }
            _ => {}
        }
        make_sequence(&spec)
    }
}

/// Outcome of one training run.
#[derive(Debug, Clone)]
pub struct TrainedRun {
    pub p_initial: f64,
    pub best_fidelity: f64,
    pub best_episode: usize,
    pub best_word: Vec<ActionId>,
    pub best_times: Vec<f64>,
    pub episode_rewards: Vec<f64>,
    pub episodes_completed: usize,
    /// Present when the run stopped early (diagnostics carried along).
    pub abort: Option<String>,
}

/// One row of the benchmark report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunEntry {
    pub spectrum_index: usize,
    pub spectrum_seed: u64,
    pub family: FamilyKind,
    pub initial_infidelity: f64,
    pub best_infidelity: f64,
    pub best_episode: usize,
    pub action_word: String,
    pub best_times: Vec<f64>,
    pub abort: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyAggregate {
    pub family: FamilyKind,
    pub runs: usize,
    pub aborted: usize,
    pub initial: Stats,
    pub best: Stats,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub config_json: String,
    pub soft_update_transposed: bool,
    pub entries: Vec<RunEntry>,
    pub aggregates: Vec<FamilyAggregate>,
}

/// Step record of a replayed episode.
#[derive(Debug, Clone)]
pub struct TraceRecord {
    pub step: usize,
    /// None for the initial row (step 0).
    pub action: Option<ActionId>,
    pub times: Vec<f64>,
    pub infidelity: f64,
    pub reward: f64,
}

/// Trains one agent against one environment for `episodes` episodes.
///
/// Per step: ε-greedy action from the online network, environment step,
/// buffer insert, then (once the buffer holds `min_minibatch` entries)
/// one gradient update on a with-replacement minibatch followed by a soft
/// target update. The epsilon schedule reviews every 50 episodes. The
/// best terminal fidelity over all episodes, exploration included, is
/// tracked together with its action word.
pub fn train_one(
    config: EpisodeConfig,
    agent: &AgentHyperparams,
    episodes: usize,
    seed: u64,
) -> Result<TrainedRun> {
    agent.validate()?;
    let n = config.initial_sequence.n_pulses();
    let steps = config.max_steps;
    let mut online = QNetwork::init(
        &agent.layer_sizes(n),
        rng::derive_seed(seed, 0, stream::NET_INIT),
    );
    let mut target = online.clone();
    let mut adam = Adam::new(&online, agent.learning_rate);
    let mut buffer = ReplayBuffer::new(agent.buffer_capacity);
    let r_initial = reward_fn(config.p_initial, config.p_initial)?;
    let mut schedule =
        EpsilonSchedule::new(r_initial, agent.epsilon_initial, agent.epsilon_review_period)?;
    let mut action_rng = rng::stream_rng(seed, 0, stream::ACTIONS);
    let mut batch_rng = rng::stream_rng(seed, 0, stream::MINIBATCH);

    let mut env = Environment::new(config);
    let mut best: Option<(f64, usize, Vec<ActionId>, Vec<f64>)> = None;
    let mut episode_rewards = Vec::with_capacity(episodes);
    let mut abort = None;

    'training: for episode in 0..episodes {
        env.reset();
        let mut word = Vec::with_capacity(steps);
        let mut terminal_reward = 0.0;
        for _ in 0..steps {
            let state = env.state().normalized_times();
            let action = select_action(&online, &state, schedule.epsilon(), &mut action_rng)?;
            let transition = match env.step(action) {
                Ok(t) => t,
                Err(e) => {
                    abort = Some(format!("episode {episode}: {e}"));
                    break 'training;
                }
            };
            word.push(action);
            terminal_reward = transition.reward;
            buffer.push(Experience {
                state,
                action: action.index(),
                reward: transition.reward,
                next_state: transition.next_state.normalized_times(),
                terminal: transition.terminal,
            });
            if buffer.len() >= agent.min_minibatch {
                let batch = buffer.sample_with_replacement(agent.minibatch_size, &mut batch_rng);
                if let Err(e) =
                    backward_and_step(&mut online, &batch, &target, agent.gamma, &mut adam)
                {
                    abort = Some(format!("episode {episode}: {e}"));
                    break 'training;
                }
                target.soft_update_from(&online, agent.tau, agent.soft_update_transposed)?;
            }
        }
        let p_final = env.last_terminal_fidelity().expect("episode ran to its terminal step");
        episode_rewards.push(terminal_reward);
        if best.as_ref().map_or(true, |(b, ..)| p_final > *b) {
            best = Some((p_final, episode, word, env.state().times().to_vec()));
        }
        schedule.record_episode(episode + 1, terminal_reward);
    }

    let episodes_completed = episode_rewards.len();
    let p_initial = env.config().p_initial;
    let (best_fidelity, best_episode, best_word, best_times) = best.unwrap_or_else(|| {
        // Nothing completed before an abort: the initial sequence is the
        // best known, reached by the all-identity word.
        (
            p_initial,
            0,
            vec![ActionId::Id; steps],
            env.config().initial_sequence.times().to_vec(),
        )
    });
    Ok(TrainedRun {
        p_initial,
        best_fidelity,
        best_episode,
        best_word,
        best_times,
        episode_rewards,
        episodes_completed,
        abort,
    })
}

pub(crate) fn aggregate_family(family: FamilyKind, entries: &[RunEntry]) -> Option<FamilyAggregate> {
    let completed: Vec<&RunEntry> =
        entries.iter().filter(|e| e.family == family && e.abort.is_none()).collect();
    let aborted = entries.iter().filter(|e| e.family == family && e.abort.is_some()).count();
    let initial: Vec<f64> = completed.iter().map(|e| e.initial_infidelity).collect();
    let best: Vec<f64> = completed.iter().map(|e| e.best_infidelity).collect();
    Some(FamilyAggregate {
        family,
        runs: completed.len(),
        aborted,
        initial: Stats::compute(&initial)?,
        best: Stats::compute(&best)?,
    })
}

fn run_task(
    config: &RunConfig,
    family: FamilyKind,
    spectrum_index: usize,
    spectrum: &NoiseSpectrum,
    run_index: usize,
) -> RunEntry {
    let spectrum_seed = config.spectrum_seed(spectrum_index);
    let failed = |message: String| RunEntry {
        spectrum_index,
        spectrum_seed,
        family,
        initial_infidelity: f64::NAN,
        best_infidelity: f64::NAN,
        best_episode: 0,
        action_word: String::new(),
        best_times: Vec::new(),
        abort: Some(message),
    };
    let initial = match config.initial_sequence(family, spectrum_index) {
        Ok(seq) => seq,
        Err(e) => return failed(e.to_string()),
    };
    let episode_config =
        match EpisodeConfig::new(initial, spectrum.clone(), config.steps_per_episode, None) {
            Ok(c) => c,
            Err(e) => return failed(e.to_string()),
        };
    let p_initial = episode_config.p_initial;
    match train_one(episode_config, &config.agent, config.episodes, config.run_seed(run_index)) {
        Ok(run) => RunEntry {
            spectrum_index,
            spectrum_seed,
            family,
            initial_infidelity: 1.0 - p_initial,
            best_infidelity: 1.0 - run.best_fidelity,
            best_episode: run.best_episode,
            action_word: format_action_word(&run.best_word),
            best_times: run.best_times,
            abort: run.abort,
        },
        Err(e) => failed(e.to_string()),
    }
}

/// Runs the full benchmark grid (families × spectra) and aggregates the
/// initial and optimized infidelity populations per family.
pub fn benchmark(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let spectra: Vec<NoiseSpectrum> = (0..config.n_spectra)
        .map(|i| {
            generate_spectrum(
                config.n_pulses,
                config.total_time,
                config.n_lorentzians,
                config.norm_target,
                config.spectrum_seed(i),
            )
        })
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, FamilyKind, usize)> = config
        .families
        .iter()
        .enumerate()
        .flat_map(|(fi, &family)| {
            (0..config.n_spectra).map(move |si| (fi * config.n_spectra + si, family, si))
        })
        .collect();

    let execute = || {
        tasks
            .par_iter()
            .map(|&(run_index, family, si)| {
                run_task(config, family, si, &spectra[si], run_index)
            })
            .collect::<Vec<RunEntry>>()
    };
    let entries = if config.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(execute)
    } else {
        execute()
    };

    let aggregates =
        config.families.iter().filter_map(|&f| aggregate_family(f, &entries)).collect();
    Ok(RunReport {
        config_json: serde_json::to_string(config)?,
        soft_update_transposed: config.agent.soft_update_transposed,
        entries,
        aggregates,
    })
}

/// Replays a fixed action word against an environment configuration,
/// computing the infidelity after every step (trace mode) and filter
/// samples at the start, midpoint, and end of the episode.
pub fn trace_episode(
    config: &EpisodeConfig,
    word: &[ActionId],
) -> Result<(Vec<TraceRecord>, Vec<(usize, f64, f64)>)> {
    if word.len() != config.max_steps {
        return Err(Error::MalformedActionWord(format!(
            "word length {} does not match the {}-step episode",
            word.len(),
            config.max_steps
        )));
    }
    let mut records = Vec::with_capacity(word.len() + 1);
    let mut sequence = config.initial_sequence.clone();
    records.push(TraceRecord {
        step: 0,
        action: None,
        times: sequence.times().to_vec(),
        infidelity: 1.0 - config.p_initial,
        reward: 0.0,
    });
    let mut snapshots = vec![(0usize, sequence.clone())];
    for (i, &action) in word.iter().enumerate() {
        sequence = apply_map(&generator(action), &sequence);
        let p = filterfn::chi(&sequence, &config.spectrum, &config.quad)?.p_avg;
        let terminal = i + 1 == word.len();
        records.push(TraceRecord {
            step: i + 1,
            action: Some(action),
            times: sequence.times().to_vec(),
            infidelity: 1.0 - p,
            reward: if terminal { reward_fn(config.p_initial, p)? } else { 0.0 },
        });
        if i + 1 == word.len() / 2 || terminal {
            snapshots.push((i + 1, sequence.clone()));
        }
    }
    let mut filter_samples = Vec::new();
    let n_samples = 600;
    for (step, seq) in &snapshots {
        for k in 0..=n_samples {
            let omega = config.quad.omega_max * k as f64 / n_samples as f64;
            filter_samples.push((*step, omega, filterfn::filter_value(seq, omega)));
        }
    }
    Ok((records, filter_samples))
}
