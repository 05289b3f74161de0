//! Solution text format.
//!
//! ```text
//! ROUTE 1: 0 4 2 0 | MASK 2
//! ROUTE 2: 0 1 3 0 | MASK 0
//! MCT 1: (1,2)
//! COST dist=812 mtev=2000 mct=1000 total=3812
//! ```
//!
//! Routes and chargers are numbered from 1; `(route,edge)` pairs are 1-based
//! as well. The mask is hexadecimal with bit `e - 1` standing for edge `e`.

use std::fmt::Write as _;

use super::{ChargePlan, CostBreakdown, Instance, Route, Solution, DEPOT};
use crate::error::{Error, Result};
use crate::mct::{route_jobs, tour_feasible};

pub fn write_solution(solution: &Solution) -> String {
    let mut out = String::new();
    for (k, (route, plan)) in solution.routes.iter().zip(&solution.plans).enumerate() {
        let stops: Vec<String> = std::iter::once(DEPOT)
            .chain(route.visits.iter().copied())
            .chain(std::iter::once(DEPOT))
            .map(|v| v.to_string())
            .collect();
        let _ = writeln!(out, "ROUTE {}: {} | MASK {:x}", k + 1, stops.join(" "), plan.0);
    }
    for (b, tour) in solution.tours.iter().enumerate() {
        let jobs: Vec<String> = tour
            .jobs
            .iter()
            .map(|j| format!("({},{})", j.route_id + 1, j.edge))
            .collect();
        let _ = writeln!(out, "MCT {}: {}", b + 1, jobs.join(" "));
    }
    let c = &solution.cost;
    let _ = writeln!(
        out,
        "COST dist={} mtev={} mct={} total={}",
        c.dist_cost, c.mtev_cost, c.mct_cost, c.total
    );
    out
}

fn split_label<'a>(line: &'a str, lineno: usize, key: &str, expected: usize) -> Result<&'a str> {
    let rest = line[key.len()..].trim_start();
    let (num, body) = rest
        .split_once(':')
        .ok_or_else(|| Error::parse(lineno, format!("{key} line needs `{key} <k>: ...`")))?;
    let num: usize = num
        .trim()
        .parse()
        .map_err(|_| Error::parse(lineno, format!("bad {key} number {num:?}")))?;
    if num != expected {
        return Err(Error::parse(lineno, format!("expected {key} {expected}, got {num}")));
    }
    Ok(body.trim())
}

fn parse_route(body: &str, lineno: usize) -> Result<(Route, ChargePlan)> {
    let (stops, mask) = body
        .split_once('|')
        .ok_or_else(|| Error::parse(lineno, "route needs `| MASK <hex>`"))?;
    let stops = stops
        .split_whitespace()
        .map(|s| s.parse::<usize>().map_err(|_| Error::parse(lineno, format!("bad node {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    if stops.len() < 2 || stops[0] != DEPOT || stops[stops.len() - 1] != DEPOT {
        return Err(Error::parse(lineno, "route must start and end at the depot"));
    }
    let mask = mask
        .trim()
        .strip_prefix("MASK")
        .ok_or_else(|| Error::parse(lineno, "expected MASK"))?
        .trim();
    let mask = mask.strip_prefix("0x").unwrap_or(mask);
    let mask = u32::from_str_radix(mask, 16)
        .map_err(|_| Error::parse(lineno, format!("bad mask {mask:?}")))?;
    Ok((Route::new(stops[1..stops.len() - 1].to_vec()), ChargePlan(mask)))
}

fn parse_jobs(body: &str, lineno: usize) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    let mut rest = body.trim();
    while !rest.is_empty() {
        let open = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::parse(lineno, "expected `(route,edge)`"))?;
        let (pair, tail) = open
            .split_once(')')
            .ok_or_else(|| Error::parse(lineno, "unclosed `(`"))?;
        let (r, e) = pair
            .split_once(',')
            .ok_or_else(|| Error::parse(lineno, "expected `(route,edge)`"))?;
        let r: usize = r.trim().parse().map_err(|_| Error::parse(lineno, "bad route index"))?;
        let e: usize = e.trim().parse().map_err(|_| Error::parse(lineno, "bad edge index"))?;
        if r == 0 || e == 0 {
            return Err(Error::parse(lineno, "route and edge indices start at 1"));
        }
        out.push((r - 1, e));
        rest = tail.trim_start();
    }
    Ok(out)
}

fn parse_cost(body: &str, lineno: usize) -> Result<CostBreakdown> {
    let mut cost = CostBreakdown::default();
    let mut seen = 0;
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| Error::parse(lineno, format!("bad cost field {field:?}")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::parse(lineno, format!("bad cost value {value:?}")))?;
        match key {
            "dist" => cost.dist_cost = value,
            "mtev" => cost.mtev_cost = value,
            "mct" => cost.mct_cost = value,
            "total" => cost.total = value,
            other => return Err(Error::parse(lineno, format!("unknown cost field {other}"))),
        }
        seen += 1;
    }
    if seen != 4 {
        return Err(Error::parse(lineno, "COST needs dist, mtev, mct and total"));
    }
    Ok(cost)
}

/// Reads a solution for `inst`. Charger jobs are rebuilt from the routes, so
/// only the `(route, edge)` references are taken from the file.
pub fn parse_solution(text: &str, inst: &Instance) -> Result<Solution> {
    let mut solution = Solution::default();
    let mut tour_refs: Vec<(usize, Vec<(usize, usize)>)> = Vec::new();
    let mut cost = None;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with("ROUTE") {
            let body = split_label(line, lineno, "ROUTE", solution.routes.len() + 1)?;
            let (route, plan) = parse_route(body, lineno)?;
            if let Some(&bad) = route.visits.iter().find(|&&v| v >= inst.nodes.len()) {
                return Err(Error::parse(lineno, format!("unknown node {bad}")));
            }
            solution.routes.push(route);
            solution.plans.push(plan);
        } else if line.starts_with("MCT") {
            let body = split_label(line, lineno, "MCT", tour_refs.len() + 1)?;
            tour_refs.push((lineno, parse_jobs(body, lineno)?));
        } else if let Some(body) = line.strip_prefix("COST") {
            cost = Some(parse_cost(body, lineno)?);
        } else {
            return Err(Error::parse(lineno, format!("unrecognized line {line:?}")));
        }
    }
    for (lineno, refs) in tour_refs {
        let mut jobs = Vec::with_capacity(refs.len());
        for (r, e) in refs {
            let route = solution
                .routes
                .get(r)
                .ok_or_else(|| Error::parse(lineno, format!("charger references route {}", r + 1)))?;
            if e > route.n_edges() {
                return Err(Error::parse(lineno, format!("route {} has no edge {e}", r + 1)));
            }
            jobs.extend(route_jobs(r, route, ChargePlan(1 << (e - 1)), inst));
        }
        solution.tours.push(tour_feasible(&jobs, inst).1);
    }
    solution.cost = cost.ok_or_else(|| Error::parse(0, "missing COST line"))?;
    Ok(solution)
}
