//! Line-oriented schedule format.
//!
//! ```text
//! LAYOUT <waveguides> <l_x> <l_y|-> <period|->
//! BIN <site> <wg> <slot> <time>
//! DELAY <wg> <length>
//! BS <wg_a> <wg_b> <theta> <phi> [<start>,<end>,<phase> ...]
//! PHASE <wg> <phi(0)> <phi(1)> ...
//! ```
//!
//! Waveguides are numbered from 1. A `BS` line without windows is a static
//! beamsplitter. Lines starting with `#` are comments.

use std::fmt::Write;

use crate::layout::{Bin, Schedule, ScheduleEvent, TimeBinLayout, Window};
use crate::{Error, Result};

fn opt(v: Option<f64>) -> String {
    v.map_or("-".to_string(), |x| x.to_string())
}

pub fn write_schedule(s: &Schedule) -> String {
    let l = &s.layout;
    let mut out = String::new();
    writeln!(out, "LAYOUT {} {} {} {}", l.n_waveguides, l.l_x, opt(l.l_y), opt(l.period)).unwrap();
    for b in &l.bins {
        writeln!(out, "BIN {} {} {} {}", b.site, b.waveguide + 1, b.slot, b.time).unwrap();
    }
    for e in &s.events {
        match e {
            ScheduleEvent::Delay { waveguide, length } => writeln!(out, "DELAY {} {}", waveguide + 1, length),
            ScheduleEvent::StaticBeamsplitter { wg_a, wg_b, theta, phi } => {
                writeln!(out, "BS {} {} {} {}", wg_a + 1, wg_b + 1, theta, phi)
            }
            ScheduleEvent::GatedBeamsplitter { wg_a, wg_b, theta, phi, windows } => {
                let w: Vec<String> = windows.iter().map(|w| format!("{},{},{}", w.start, w.end, w.phase)).collect();
                writeln!(out, "BS {} {} {} {} {}", wg_a + 1, wg_b + 1, theta, phi, w.join(" "))
            }
            ScheduleEvent::Phase { waveguide, table } => {
                let t: Vec<String> = table.iter().map(|v| v.to_string()).collect();
                writeln!(out, "PHASE {} {}", waveguide + 1, t.join(" "))
            }
        }
        .unwrap();
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut layout: Option<TimeBinLayout> = None;
    let mut events = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |msg: &str| Error::Parse { line, msg: msg.to_string() };
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if toks.is_empty() || toks[0].starts_with('#') {
            continue;
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| err(&format!("bad number {s:?}")));
        let int = |s: &str| s.parse::<usize>().map_err(|_| err(&format!("bad integer {s:?}")));
        let wg = |s: &str| int(s)?.checked_sub(1).ok_or_else(|| err("waveguides are numbered from 1"));
        let opt_num = |s: &str| if s == "-" { Ok(None) } else { num(s).map(Some) };
        let need = |k: usize| if toks.len() < k { Err(err("missing fields")) } else { Ok(()) };
        match toks[0] {
            "LAYOUT" => {
                need(5)?;
                layout = Some(TimeBinLayout {
                    n_waveguides: int(toks[1])?,
                    bins: Vec::new(),
                    l_x: num(toks[2])?,
                    l_y: opt_num(toks[3])?,
                    period: opt_num(toks[4])?,
                });
            }
            "BIN" => {
                need(5)?;
                let l = layout.as_mut().ok_or_else(|| err("BIN before LAYOUT"))?;
                l.bins.push(Bin { site: int(toks[1])?, waveguide: wg(toks[2])?, slot: int(toks[3])?, time: num(toks[4])? });
            }
            "DELAY" => {
                need(3)?;
                events.push(ScheduleEvent::Delay { waveguide: wg(toks[1])?, length: num(toks[2])? });
            }
            "BS" => {
                need(5)?;
                let (wg_a, wg_b, theta, phi) = (wg(toks[1])?, wg(toks[2])?, num(toks[3])?, num(toks[4])?);
                if toks.len() == 5 {
                    events.push(ScheduleEvent::StaticBeamsplitter { wg_a, wg_b, theta, phi });
                } else {
                    let windows = toks[5..]
                        .iter()
                        .map(|t| {
                            let f: Vec<&str> = t.split(',').collect();
                            if f.len() != 3 {
                                return Err(err("window must be start,end,phase"));
                            }
                            Ok(Window { start: num(f[0])?, end: num(f[1])?, phase: num(f[2])? })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    events.push(ScheduleEvent::GatedBeamsplitter { wg_a, wg_b, theta, phi, windows });
                }
            }
            "PHASE" => {
                need(3)?;
                let table = toks[2..].iter().map(|t| num(t)).collect::<Result<Vec<_>>>()?;
                events.push(ScheduleEvent::Phase { waveguide: wg(toks[1])?, table });
            }
            other => return Err(err(&format!("unknown directive {other}"))),
        }
    }
    let layout = layout.ok_or(Error::Parse { line: 0, msg: "no LAYOUT line".into() })?;
    let mut bins = layout.bins.clone();
    bins.sort_by_key(|b| b.site);
    let s = Schedule { layout: TimeBinLayout { bins, ..layout }, events };
    s.validate()?;
    Ok(s)
}
