use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::boundary::{BetaValue, RobinMeasure};
use crate::geometry::{Domain, Point, MAX_COMPONENTS};

use super::scheme::ReflectionScheme;
use super::{bridge_exit_probability, Level};

/// State of one simulated trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct PathState {
    pub t: f64,
    pub steps: u64,
    pub position: Point,
    pub start: Point,
    /// Local time per boundary component.
    pub ell: [f64; MAX_COMPONENTS],
    /// Additive functional `A_t = sum beta * d ell`.
    pub functional: f64,
    pub alive: bool,
    /// Running sum of the driving increments (`B_t`).
    pub noise_sum: Point,
    /// Running sum of reflection displacements (`X_t - x0 - B_t`).
    pub push: Point,
    /// Whether the path has touched the boundary, including contacts flagged
    /// by the bridge correction.
    pub touched: bool,
}

impl PathState {
    pub fn new(x0: Point) -> Self {
        Self {
            t: 0.0,
            steps: 0,
            position: x0,
            start: x0,
            ell: [0.0; MAX_COMPONENTS],
            functional: 0.0,
            alive: true,
            noise_sum: Point::ZERO,
            push: Point::ZERO,
            touched: false,
        }
    }

    pub fn total_local_time(&self) -> f64 {
        self.ell.iter().sum()
    }

    /// `exp(-A_t)` for live paths, zero once absorbed.
    pub fn weight(&self) -> f64 {
        if self.alive {
            (-self.functional).exp()
        } else {
            0.0
        }
    }
}

/// What happened on one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepEvent {
    pub local_time: f64,
    /// Increment of the additive functional.
    pub functional: f64,
    pub component: Option<usize>,
    /// Position after the step (the boundary point when `local_time > 0`
    /// under the projection scheme).
    pub position: Point,
    pub absorbed: bool,
}

/// Advances a [`PathState`] under one boundary measure.
#[derive(Debug)]
pub struct Walker<'a> {
    domain: &'a Domain,
    measure: &'a RobinMeasure,
    scheme: &'a dyn ReflectionScheme,
    h: f64,
    bridge: bool,
    dirichlet_mask: u8,
    pub state: PathState,
}

impl<'a> Walker<'a> {
    pub fn new(
        domain: &'a Domain,
        measure: &'a RobinMeasure,
        scheme: &'a dyn ReflectionScheme,
        h: f64,
        bridge: bool,
        x0: Point,
    ) -> Self {
        let dirichlet_mask = (0..measure.num_components())
            .filter(|&id| measure.is_dirichlet(id))
            .fold(0u8, |m, id| m | (1 << id));
        Self {
            domain,
            measure,
            scheme,
            h,
            bridge,
            dirichlet_mask,
            state: PathState::new(x0),
        }
    }

    /// Advances by one step with Brownian increment `dw`. `bridge_u` holds one
    /// uniform per boundary component when the bridge correction is enabled.
    pub fn advance(&mut self, dw: Point, bridge_u: &[f64]) -> StepEvent {
        let s = &mut self.state;
        s.t += self.h;
        s.steps += 1;
        if !s.alive {
            return StepEvent {
                position: s.position,
                ..StepEvent::default()
            };
        }
        let x = s.position;
        let y = x + dw;
        s.noise_sum += dw;

        let exited = self.domain.violated_components(y) & self.dirichlet_mask;
        if exited != 0 {
            let id = exited.trailing_zeros() as usize;
            return self.absorb(y, id);
        }

        if self.bridge {
            for (id, &u) in bridge_u
                .iter()
                .enumerate()
                .take(self.domain.num_components())
            {
                let d_end = self.domain.component_distance(y, id);
                if d_end < 0.0 {
                    continue; // contact observed directly
                }
                let d_start = self.domain.component_distance(x, id).max(0.0);
                if u < bridge_exit_probability(d_start, d_end, self.h) {
                    if self.dirichlet_mask & (1 << id) != 0 {
                        return self.absorb(y, id);
                    }
                    self.state.touched = true;
                }
            }
        }

        let s = &mut self.state;
        let out = self.scheme.reflect(self.domain, x, y, self.h);
        let mut event = StepEvent {
            position: out.position,
            ..StepEvent::default()
        };
        if let Some(bp) = out.boundary.filter(|_| out.local_time > 0.0) {
            let beta = self
                .measure
                .beta_at(&bp)
                .expect("scheme produced a boundary point outside its component");
            let da = match beta {
                BetaValue::Finite(b) => b * out.local_time,
                // only reachable by the occupation scheme's band; absorption
                // happens on crossing
                BetaValue::Dirichlet => 0.0,
            };
            s.ell[bp.component] += out.local_time;
            s.functional += da;
            event.local_time = out.local_time;
            event.functional = da;
            event.component = Some(bp.component);
            s.touched = true;
        }
        if out.position != y {
            s.push += out.position - y;
            s.touched = true;
        }
        s.position = out.position;
        event
    }

    fn absorb(&mut self, y: Point, id: usize) -> StepEvent {
        let bp = self.domain.project_onto_component(y, id);
        let s = &mut self.state;
        s.push += bp.position - y;
        s.position = bp.position;
        s.alive = false;
        s.touched = true;
        StepEvent {
            component: Some(id),
            position: bp.position,
            absorbed: true,
            ..StepEvent::default()
        }
    }
}

/// Gaussian increments with variance `h` per coordinate, built from
/// `substeps` finer increments so that coarse and fine levels on the same
/// stream see the same Brownian path.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    sd: f64,
    substeps: u32,
    dim: usize,
}

impl NoiseStream {
    pub fn new(rng: ChaCha8Rng, level: Level, dim: usize) -> Self {
        Self {
            rng,
            sd: (level.h / f64::from(level.substeps)).sqrt(),
            substeps: level.substeps,
            dim,
        }
    }

    pub fn next_increment(&mut self) -> Point {
        let mut dw = Point::ZERO;
        for _ in 0..self.substeps {
            let gx: f64 = self.rng.sample(StandardNormal);
            dw.x += self.sd * gx;
            if self.dim == 2 {
                let gy: f64 = self.rng.sample(StandardNormal);
                dw.y += self.sd * gy;
            }
        }
        dw
    }
}

/// Several walkers driven in lockstep by one noise stream: the common-random-
/// numbers coupling behind every pathwise comparison.
#[derive(Debug)]
pub struct Family<'a> {
    pub walkers: Vec<Walker<'a>>,
    pub events: Vec<StepEvent>,
    noise: NoiseStream,
    bridge: Option<(ChaCha8Rng, Vec<f64>)>,
}

impl<'a> Family<'a> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        domain: &'a Domain,
        measures: &[&'a RobinMeasure],
        scheme: &'a dyn ReflectionScheme,
        level: Level,
        bridge: bool,
        x0: Point,
        brownian: ChaCha8Rng,
        bridge_rng: ChaCha8Rng,
    ) -> Self {
        let walkers: Vec<_> = measures
            .iter()
            .map(|m| Walker::new(domain, m, scheme, level.h, bridge, x0))
            .collect();
        let events = vec![StepEvent::default(); walkers.len()];
        Self {
            walkers,
            events,
            noise: NoiseStream::new(brownian, level, domain.dim()),
            bridge: bridge.then(|| (bridge_rng, vec![0.0; domain.num_components()])),
        }
    }

    /// Advances every walker by one step. Returns `false` once all are absorbed.
    pub fn step(&mut self) -> bool {
        let dw = self.noise.next_increment();
        let uniforms: &[f64] = match &mut self.bridge {
            Some((rng, buf)) => {
                for u in buf.iter_mut() {
                    *u = rng.random();
                }
                buf
            }
            None => &[],
        };
        let mut any_alive = false;
        for (w, ev) in self.walkers.iter_mut().zip(self.events.iter_mut()) {
            *ev = w.advance(dw, uniforms);
            any_alive |= w.state.alive;
        }
        any_alive
    }

    pub fn any_alive(&self) -> bool {
        self.walkers.iter().any(|w| w.state.alive)
    }

    pub fn state(&self, i: usize) -> &PathState {
        &self.walkers[i].state
    }
}
