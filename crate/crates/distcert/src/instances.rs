//! Problems assembled from files, and the bundled instances.

use distcert_core::constraints::InitMode;
use distcert_core::encode::{Problem, StrategySpec};
use distcert_core::templates::StrategyClass;

use crate::bench::gridworld::{gen_gridworld, GridSpec};
use crate::error::Result;
use crate::formats::init::parse_init;
use crate::formats::mdp::parse_mdp;
use crate::formats::spec::parse_spec;
use crate::formats::strategy::parse_strategy;

/// A named text input.
#[derive(Debug, Clone, Copy)]
pub struct Source<'a> {
    pub name: &'a str,
    pub text: &'a str,
}

/// Fixed strategy for verification, or a class for synthesis.
#[derive(Debug, Clone, Copy)]
pub enum Task<'a> {
    Verify(Source<'a>),
    Synthesize(StrategyClass),
}

pub fn build_problem(mdp: Source, spec: Source, init: Source, task: Task, mode: InitMode) -> Result<Problem> {
    let m = parse_mdp(mdp.text, mdp.name)?;
    let n = m.num_states();
    let nba = parse_spec(spec.text, n, spec.name)?;
    let init = parse_init(init.text, n, init.name)?;
    let strategy = match task {
        Task::Verify(s) => StrategySpec::Given(parse_strategy(s.text, &m, s.name)?),
        Task::Synthesize(class) => StrategySpec::Template { class, eps_den: None },
    };
    Ok(Problem {
        mdp: m,
        nba,
        init,
        mode,
        strategy,
    })
}

macro_rules! file {
    ($name:literal) => {
        Source {
            name: $name,
            text: include_str!(concat!("../instances/", $name)),
        }
    };
}

pub const RUNNING_MDP: Source = file!("running.mdp");
pub const RUNNING_INIT: Source = file!("running.init");
pub const B_AT_A: Source = file!("b-at-a.strategy");
pub const GF_SPEC: Source = file!("cav23-gf.spec");
pub const UNTIL_SPEC: Source = file!("cav23-until.spec");
pub const BAND_SPEC: Source = file!("cav23-band.hoa");
pub const UNSAT_SPEC: Source = file!("running-unsat.spec");
pub const GRID3_MDP: Source = file!("gridworld3.mdp");
pub const GRID3_SPEC: Source = file!("gridworld3.spec");
pub const GRID3_INIT: Source = file!("gridworld3.init");
pub const WEB_GRAPH: Source = file!("web.graph");

/// A bundled problem and whether it is expected to be solved.
#[derive(Debug, Clone, Copy)]
pub struct Instance {
    pub name: &'static str,
    pub mdp: Source<'static>,
    pub spec: Source<'static>,
    pub init: Source<'static>,
    pub task: Task<'static>,
    pub expect_solved: bool,
}

impl Instance {
    pub fn problem(&self) -> Result<Problem> {
        build_problem(self.mdp, self.spec, self.init, self.task, InitMode::Universal)
    }
}

const SYNTH: Task = Task::Synthesize(StrategyClass::Memoryless);

const fn running(name: &'static str, spec: Source<'static>, task: Task<'static>, expect_solved: bool) -> Instance {
    Instance {
        name,
        mdp: RUNNING_MDP,
        spec,
        init: RUNNING_INIT,
        task,
        expect_solved,
    }
}

pub const INSTANCES: &[Instance] = &[
    running("cav23-gf-verify", GF_SPEC, Task::Verify(B_AT_A), true),
    running("cav23-gf-synth", GF_SPEC, SYNTH, true),
    running("cav23-until-verify", UNTIL_SPEC, Task::Verify(B_AT_A), true),
    running("cav23-until-synth", UNTIL_SPEC, SYNTH, true),
    running("cav23-band-verify", BAND_SPEC, Task::Verify(B_AT_A), false),
    running("cav23-band-synth", BAND_SPEC, SYNTH, false),
    running("running-unsat-synth", UNSAT_SPEC, SYNTH, false),
    Instance {
        name: "gridworld3-synth",
        mdp: GRID3_MDP,
        spec: GRID3_SPEC,
        init: GRID3_INIT,
        task: SYNTH,
        expect_solved: true,
    },
];

pub fn find(name: &str) -> Option<&'static Instance> {
    INSTANCES.iter().find(|i| i.name == name)
}

/// The bundled 3×3 gridworld files, regenerated.
pub fn gridworld3_files() -> Result<(String, String, String)> {
    let g = gen_gridworld(&GridSpec::three_by_three())?;
    Ok((crate::formats::mdp::write_mdp(&g.mdp), format!("{}\n", g.spec), g.init))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_instances_parse() {
        for i in INSTANCES {
            i.problem().unwrap_or_else(|e| panic!("{}: {e}", i.name));
        }
    }

    #[test]
    fn bundled_gridworld_matches_generator() {
        let (mdp, spec, init) = gridworld3_files().unwrap();
        assert_eq!(GRID3_MDP.text, mdp);
        assert_eq!(GRID3_SPEC.text, spec);
        assert_eq!(GRID3_INIT.text, init);
    }
}

