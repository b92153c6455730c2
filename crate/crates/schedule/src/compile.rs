//! Schedules for periodic chains and square lattices.
//!
//! Each coupling layer follows the same pattern: couple the aligned pairs,
//! delay the odd-parity waveguides by one pitch so each bin meets its other
//! neighbour, delay the even-parity waveguides by half a lattice length so
//! the wrap-around pair meets, then realign.

use std::collections::HashMap;
use std::f64::consts::PI;

use photonsim_core::lattice::{trotter_plan, Direction, Geometry, LatticeModel};
use photonsim_core::lattice::Boundary;
use photonsim_core::C64;

use crate::layout::{Schedule, ScheduleEvent, TimeBinLayout, Window};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Fully packed fiber loops of length (N_x/2)·l_x: two static
    /// beamsplitters, periodicity comes from the loop itself.
    EvenSimple,
    /// Static first layer, gated beamsplitters for the other neighbour and
    /// the wrap-around link, explicit realignment delay.
    General,
}

/// Which edges a layer is meant to couple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Class {
    Even,
    Odd,
    Wrap,
    OddAndWrap,
}

struct Compiler<'a> {
    model: &'a LatticeModel,
    layout: TimeBinLayout,
    delta_t: f64,
    hops: HashMap<(usize, usize), C64>,
    delays: Vec<f64>,
    events: Vec<ScheduleEvent>,
}

fn wrap_phase(phi: f64) -> f64 {
    let r = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if r <= -PI + 1e-12 {
        PI
    } else {
        r
    }
}

impl<'a> Compiler<'a> {
    fn new(model: &'a LatticeModel, layout: TimeBinLayout, delta_t: f64) -> Self {
        let mut hops = HashMap::new();
        for e in &model.edges {
            hops.insert((e.i, e.j), e.hopping);
            hops.insert((e.j, e.i), e.hopping.conj());
        }
        let n = layout.n_waveguides;
        Self { model, layout, delta_t, hops, delays: vec![0.0; n], events: Vec::new() }
    }

    fn delay(&mut self, wgs: &[usize], length: f64) {
        for &w in wgs {
            self.delays[w] += length;
            self.events.push(ScheduleEvent::Delay { waveguide: w, length });
        }
    }

    fn arrival(&self, site: usize) -> f64 {
        let b = &self.layout.bins[site];
        self.layout.wrap(b.time + self.delays[b.waveguide])
    }

    /// Edges of the model in `class` along `dir`, as (site in wg_a, site in wg_b).
    fn pairs(&self, dir: Direction, class: Class, wg_a: usize, wg_b: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for e in &self.model.edges {
            if e.direction != dir {
                continue;
            }
            let (ci, cj) = (self.model.coords(e.i), self.model.coords(e.j));
            let (a, b) = match dir {
                Direction::Horizontal => (ci.0, cj.0),
                Direction::Vertical => (ci.1, cj.1),
            };
            let wrap = b < a;
            let keep = match class {
                Class::Even => e.offset % 2 == 0 && !wrap,
                Class::Odd => e.offset % 2 == 1 && !wrap,
                Class::Wrap => wrap,
                Class::OddAndWrap => e.offset % 2 == 1,
            };
            if !keep {
                continue;
            }
            let (wi, wj) = (self.layout.bins[e.i].waveguide, self.layout.bins[e.j].waveguide);
            if wi == wg_a && wj == wg_b {
                out.push((e.i, e.j));
            } else if wi == wg_b && wj == wg_a {
                out.push((e.j, e.i));
            }
        }
        out.sort_by(|x, y| self.arrival(x.0).total_cmp(&self.arrival(y.0)));
        out
    }

    /// θ and φ of the generator θ(e^{iφ} b_a b_b† + h.c.) for a fired pair.
    fn oriented(&self, a: usize, b: usize) -> (f64, f64) {
        let j = self.hops[&(a, b)];
        (j.norm() * self.delta_t, wrap_phase(j.arg()))
    }

    fn coincident_count(&self, wg_a: usize, wg_b: usize) -> usize {
        let tol = self.layout.tolerance();
        let tb: Vec<f64> = self.layout.bins_in(wg_b).map(|b| self.arrival(b.site)).collect();
        self.layout
            .bins_in(wg_a)
            .filter(|b| {
                let t = self.arrival(b.site);
                tb.iter().any(|u| (t - u).abs() < tol)
            })
            .count()
    }

    /// Smallest gap between distinct arrival times on the two waveguides.
    fn min_spacing(&self, wg_a: usize, wg_b: usize) -> f64 {
        let tol = self.layout.tolerance();
        let mut t: Vec<f64> = self
            .layout
            .bins
            .iter()
            .filter(|b| b.waveguide == wg_a || b.waveguide == wg_b)
            .map(|b| self.arrival(b.site))
            .collect();
        t.sort_by(f64::total_cmp);
        t.windows(2).map(|w| w[1] - w[0]).filter(|d| *d > tol).fold(self.layout.l_x, f64::min)
    }

    /// One beamsplitter element coupling exactly `pairs`. Static when the
    /// pairs share θ, φ and no other bins coincide there, unless `gated`.
    fn couple(&mut self, wg_a: usize, wg_b: usize, pairs: &[(usize, usize)], gated: bool) -> Result<()> {
        if pairs.is_empty() {
            return Ok(());
        }
        let tol = self.layout.tolerance();
        for &(a, b) in pairs {
            if (self.arrival(a) - self.arrival(b)).abs() > tol {
                return Err(Error::Malformed(format!("sites {a} and {b} do not meet at element {}", self.events.len())));
            }
        }
        let params: Vec<(f64, f64)> = pairs.iter().map(|&(a, b)| self.oriented(a, b)).collect();
        let theta = params[0].0;
        if params.iter().any(|p| (p.0 - theta).abs() > 1e-14) {
            return Err(Error::Geometry("hopping magnitudes differ across a layer".into()));
        }
        let uniform = params.iter().all(|p| wrap_phase(p.1 - params[0].1).abs() < 1e-14);
        if !gated && uniform && self.coincident_count(wg_a, wg_b) == pairs.len() {
            self.events.push(ScheduleEvent::StaticBeamsplitter { wg_a, wg_b, theta, phi: params[0].1 });
            return Ok(());
        }
        let half = 0.5 * self.min_spacing(wg_a, wg_b);
        let windows = pairs
            .iter()
            .zip(&params)
            .map(|(&(a, _), p)| {
                let t = self.arrival(a);
                Window { start: t - half, end: t + half, phase: p.1 }
            })
            .collect();
        self.events.push(ScheduleEvent::GatedBeamsplitter { wg_a, wg_b, theta, phi: 0.0, windows });
        Ok(())
    }

    fn phases(&mut self, n_max: usize) {
        let table: Vec<f64> =
            trotter_plan(self.model, self.delta_t, n_max).onsite_phase_table.iter().map(|v| v + 0.0).collect();
        if table.iter().all(|p| *p == 0.0) {
            return;
        }
        for w in 0..self.layout.n_waveguides {
            self.events.push(ScheduleEvent::Phase { waveguide: w, table: table.clone() });
        }
    }

    /// The three coupling layers along `dir`. `pairs_of[k]` lists the
    /// waveguide pairs (even side, odd side) coupled side by side.
    fn three_layers(&mut self, dir: Direction, wg_pairs: &[(usize, usize)], pitch: f64, n: usize, open: bool) -> Result<()> {
        let evens: Vec<usize> = wg_pairs.iter().map(|p| p.0).collect();
        let odds: Vec<usize> = wg_pairs.iter().map(|p| p.1).collect();
        for &(a, b) in wg_pairs {
            let p = self.pairs(dir, Class::Even, a, b);
            self.couple(a, b, &p, false)?;
        }
        self.delay(&odds, pitch);
        for &(a, b) in wg_pairs {
            let p = self.pairs(dir, Class::Odd, a, b);
            self.couple(a, b, &p, true)?;
        }
        self.delay(&evens, (n / 2) as f64 * pitch);
        if !open {
            for &(a, b) in wg_pairs {
                let p = self.pairs(dir, Class::Wrap, a, b);
                self.couple(a, b, &p, true)?;
            }
        }
        self.delay(&odds, (n / 2 - 1) as f64 * pitch);
        Ok(())
    }
}

/// Schedule for one Trotter step of a chain model. `n_max` fixes the
/// length of the on-site phase tables.
pub fn compile_1d(model: &LatticeModel, delta_t: f64, n_max: usize, l_x: f64, variant: Variant) -> Result<Schedule> {
    let Geometry::Chain { nx } = model.geometry else {
        return Err(Error::Geometry("compile_1d needs a chain".into()));
    };
    if nx % 2 == 1 {
        return Err(Error::Geometry(format!(
            "odd chain length {nx}: the wrap-around link would join two bins of one waveguide"
        )));
    }
    let open = model.boundary == Boundary::Open;
    let mut c = match variant {
        Variant::EvenSimple => {
            if open {
                return Err(Error::Geometry("the packed-loop variant is periodic by construction".into()));
            }
            let mut c = Compiler::new(model, TimeBinLayout::chain(nx, l_x, true)?, delta_t);
            let green = c.pairs(Direction::Horizontal, Class::Even, 0, 1);
            c.couple(0, 1, &green, false)?;
            c.delay(&[1], l_x);
            let yellow = c.pairs(Direction::Horizontal, Class::OddAndWrap, 0, 1);
            c.couple(0, 1, &yellow, false)?;
            c.delay(&[1], (nx / 2 - 1) as f64 * l_x);
            c
        }
        Variant::General => {
            let mut c = Compiler::new(model, TimeBinLayout::chain(nx, l_x, false)?, delta_t);
            c.three_layers(Direction::Horizontal, &[(0, 1)], l_x, nx, open)?;
            c
        }
    };
    if c.events.iter().any(|e| matches!(e, ScheduleEvent::GatedBeamsplitter { .. })) && variant == Variant::EvenSimple {
        return Err(Error::Geometry("packed loop needs uniform hopping".into()));
    }
    c.phases(n_max);
    let s = Schedule { layout: c.layout, events: c.events };
    s.validate()?;
    Ok(s)
}

/// Schedule for one Trotter step of a periodic square lattice: three layers
/// on the fine bins (x links), three on the coarse clusters (y links), then
/// the on-site phases. Gauge phases ride on the beamsplitter windows.
pub fn compile_2d(model: &LatticeModel, delta_t: f64, n_max: usize, l_x: f64, l_y: f64) -> Result<Schedule> {
    let Geometry::Square { nx, ny } = model.geometry else {
        return Err(Error::Geometry("compile_2d needs a square lattice".into()));
    };
    let open = model.boundary == Boundary::Open;
    let mut c = Compiler::new(model, TimeBinLayout::square(nx, ny, l_x, l_y)?, delta_t);
    c.three_layers(Direction::Horizontal, &[(0, 1), (2, 3)], l_x, nx, open)?;
    c.three_layers(Direction::Vertical, &[(0, 2), (1, 3)], l_y, ny, open)?;
    c.phases(n_max);
    let s = Schedule { layout: c.layout, events: c.events };
    s.validate()?;
    Ok(s)
}
