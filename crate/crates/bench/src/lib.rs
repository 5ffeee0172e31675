//! Shared fixtures for the construction benchmarks.

use polynet::{KnotGrid, MethodSpec, Network, Target, TargetSamples};

pub fn samples(target: Target, n: usize) -> TargetSamples {
    TargetSamples::from_fn(KnotGrid::new(n).expect("n >= 1"), |x| target.eval(x))
}

pub fn network(spec: MethodSpec, target: Target, n: usize) -> Network {
    spec.build(&samples(target, n)).expect("valid construction")
}
