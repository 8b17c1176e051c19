//! Named surfaces used by the CLI and the test suites.

use crate::abelian::AbelianGroup;
use crate::error::{Error, Result};
use crate::surface::{BranchTuple, SurfaceSpec};

pub struct NamedSurface {
    pub name: &'static str,
    pub spec: SurfaceSpec,
    /// small enough for the full-complex oracle
    pub oracle: bool,
}

impl NamedSurface {
    pub fn resolve(&self) -> Result<(AbelianGroup, BranchTuple)> {
        self.spec.resolve()
    }
}

fn cyclic(n: i64, t: [i64; 4]) -> SurfaceSpec {
    SurfaceSpec::new(vec![n], t.iter().map(|&x| vec![x]).collect())
}

pub fn corpus() -> Vec<NamedSurface> {
    let named = |name, spec, oracle| NamedSurface { name, spec, oracle };
    vec![
        named("pillowcase", SurfaceSpec::new(vec![], vec![vec![]; 4]), true),
        named("wollmilchsau", cyclic(4, [1, 1, 1, 1]), true),
        named("ornithorynque", cyclic(6, [1, 1, 1, 3]), true),
        named("z3-0111", cyclic(3, [0, 1, 1, 1]), true),
        named("z8-1115", cyclic(8, [1, 1, 1, 5]), true),
        named(
            "klein",
            SurfaceSpec::new(vec![2, 2], vec![vec![1, 0], vec![0, 1], vec![1, 0], vec![0, 1]]),
            true,
        ),
        named(
            "nondiscrete-480",
            SurfaceSpec::new(
                vec![120, 120, 120],
                vec![vec![20, 0, 0], vec![0, 15, 0], vec![0, 0, 12], vec![100, 105, 108]],
            ),
            false,
        ),
    ]
}

pub fn corpus_surface(name: &str) -> Result<NamedSurface> {
    let all = corpus();
    let known: Vec<&str> = all.iter().map(|s| s.name).collect();
    let known = known.join(", ");
    all.into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown corpus surface {name:?}; known: {known}")))
}
