//! Bin encoding and schedule elements.

use crate::{Error, Result};

/// One lattice site in a time bin. `time` is the arrival time at the
/// circuit input in units where the group velocity is 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub site: usize,
    pub waveguide: usize,
    pub slot: usize,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimeBinLayout {
    pub n_waveguides: usize,
    pub bins: Vec<Bin>,
    pub l_x: f64,
    /// Cluster pitch, 2D only.
    pub l_y: Option<f64>,
    /// Loop length when the fibers are fully packed: arrival times are then
    /// compared modulo this period.
    pub period: Option<f64>,
}

impl TimeBinLayout {
    /// 0-based `x` even → waveguide 0, odd → waveguide 1; bins `l_x` apart
    /// with site 0 aligned with site 1.
    pub fn chain(nx: usize, l_x: f64, packed: bool) -> Result<Self> {
        if nx < 4 || nx % 2 == 1 {
            return Err(Error::Geometry(format!("chain length {nx} must be even and at least 4")));
        }
        positive(l_x, "l_x")?;
        let bins = (0..nx)
            .map(|x| Bin { site: x, waveguide: x % 2, slot: x / 2, time: (x / 2) as f64 * l_x })
            .collect();
        let period = packed.then_some((nx / 2) as f64 * l_x);
        Ok(Self { n_waveguides: 2, bins, l_x, l_y: None, period })
    }

    /// Waveguide from the parities of (x, y): (even, even) → 0, (odd, even) → 1,
    /// (even, odd) → 2, (odd, odd) → 3. Rows form clusters `l_y` apart.
    pub fn square(nx: usize, ny: usize, l_x: f64, l_y: f64) -> Result<Self> {
        for (n, name) in [(nx, "N_x"), (ny, "N_y")] {
            if n < 4 || n % 2 == 1 {
                return Err(Error::Geometry(format!("{name} = {n} must be even and at least 4")));
            }
        }
        positive(l_x, "l_x")?;
        positive(l_y, "l_y")?;
        if l_y <= (nx / 2) as f64 * l_x {
            return Err(Error::Geometry(format!("cluster pitch {l_y} must exceed the cluster width {}", (nx / 2) as f64 * l_x)));
        }
        let mut bins = Vec::with_capacity(nx * ny);
        for y in 0..ny {
            for x in 0..nx {
                bins.push(Bin {
                    site: y * nx + x,
                    waveguide: (x % 2) + 2 * (y % 2),
                    slot: (y / 2) * (nx / 2) + x / 2,
                    time: (y / 2) as f64 * l_y + (x / 2) as f64 * l_x,
                });
            }
        }
        Ok(Self { n_waveguides: 4, bins, l_x, l_y: Some(l_y), period: None })
    }

    pub fn n_sites(&self) -> usize {
        self.bins.len()
    }

    pub fn bins_in(&self, wg: usize) -> impl Iterator<Item = &Bin> {
        self.bins.iter().filter(move |b| b.waveguide == wg)
    }

    /// Time resolution used to decide coincidence.
    pub fn tolerance(&self) -> f64 {
        1e-9 * self.l_x.min(self.l_y.unwrap_or(f64::INFINITY))
    }

    /// Reduce a time modulo the loop period, if any.
    pub fn wrap(&self, t: f64) -> f64 {
        match self.period {
            Some(p) => {
                let r = t.rem_euclid(p);
                if p - r < self.tolerance() {
                    0.0
                } else {
                    r
                }
            }
            None => t,
        }
    }

    /// Bijectivity of the site assignment.
    pub fn validate(&self) -> Result<()> {
        let mut seen = vec![false; self.bins.len()];
        for b in &self.bins {
            if b.site >= seen.len() || seen[b.site] || b.waveguide >= self.n_waveguides {
                return Err(Error::Geometry(format!("bad bin {b:?}")));
            }
            seen[b.site] = true;
        }
        Ok(())
    }
}

fn positive(v: f64, name: &str) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Geometry(format!("{name} must be positive, got {v}")))
    }
}

/// Interval `[start, end)` during which a gated beamsplitter is on. `phase`
/// is added to the element's φ for pairs fired inside it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    pub phase: f64,
}

impl Window {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.start && t < self.end
    }
}

/// Optical element. Waveguide indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleEvent {
    Delay { waveguide: usize, length: f64 },
    StaticBeamsplitter { wg_a: usize, wg_b: usize, theta: f64, phi: f64 },
    GatedBeamsplitter { wg_a: usize, wg_b: usize, theta: f64, phi: f64, windows: Vec<Window> },
    Phase { waveguide: usize, table: Vec<f64> },
}

impl ScheduleEvent {
    pub fn is_beamsplitter(&self) -> bool {
        matches!(self, Self::StaticBeamsplitter { .. } | Self::GatedBeamsplitter { .. })
    }

    pub fn is_delay(&self) -> bool {
        matches!(self, Self::Delay { .. })
    }

    fn validate(&self, n_wg: usize) -> Result<()> {
        let check = |w: usize| {
            if w < n_wg {
                Ok(())
            } else {
                Err(Error::Malformed(format!("waveguide {w} out of range")))
            }
        };
        match self {
            Self::Delay { waveguide, length } => {
                check(*waveguide)?;
                if !(*length >= 0.0) {
                    return Err(Error::Malformed(format!("negative delay {length}")));
                }
            }
            Self::StaticBeamsplitter { wg_a, wg_b, .. } => {
                check(*wg_a)?;
                check(*wg_b)?;
                if wg_a == wg_b {
                    return Err(Error::Malformed("beamsplitter needs two waveguides".into()));
                }
            }
            Self::GatedBeamsplitter { wg_a, wg_b, windows, .. } => {
                check(*wg_a)?;
                check(*wg_b)?;
                if wg_a == wg_b {
                    return Err(Error::Malformed("beamsplitter needs two waveguides".into()));
                }
                if windows.iter().any(|w| !(w.end > w.start)) {
                    return Err(Error::Malformed("empty on-window".into()));
                }
                if windows.windows(2).any(|p| p[1].start < p[0].end) {
                    return Err(Error::Malformed("on-windows overlap or are unsorted".into()));
                }
            }
            Self::Phase { waveguide, .. } => check(*waveguide)?,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub layout: TimeBinLayout,
    pub events: Vec<ScheduleEvent>,
}

impl Schedule {
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        self.events.iter().try_for_each(|e| e.validate(self.layout.n_waveguides))
    }

    /// Total delay accumulated by each waveguide.
    pub fn net_delays(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.layout.n_waveguides];
        for e in &self.events {
            if let ScheduleEvent::Delay { waveguide, length } = e {
                d[*waveguide] += length;
            }
        }
        d
    }

    pub fn beamsplitter_count(&self) -> usize {
        self.events.iter().filter(|e| e.is_beamsplitter()).count()
    }

    pub fn delay_count(&self) -> usize {
        self.events.iter().filter(|e| e.is_delay()).count()
    }
}
