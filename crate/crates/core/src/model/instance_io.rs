//! Line-oriented instance format.
//!
//! ```text
//! NAME <string>
//! SIZE <n>
//! CAPACITY <Q>
//! BATTERY_MTEV <P>
//! BATTERY_MCT <beta>
//! GAMMA <gamma>
//! PHI <phi>
//! COST_DIST <kappa_t>
//! COST_MTEV <kappa_v>
//! COST_MCT <kappa_c>
//! NODES
//! <id> <x> <y> <demand>
//! ...
//! EOF
//! ```
//!
//! With an explicit `MATRIX` section the node lines are `<id> <demand>` and
//! the matrix follows as lower-diagonal rows: row `i` lists `d(i,0) .. d(i,i)`.
//! Anything after `#` on a line is ignored.

use std::fmt::Write as _;

use super::{Instance, Node, Params};
use crate::error::{Error, Result};

#[derive(Default)]
struct Header {
    name: Option<String>,
    size: Option<usize>,
    capacity: Option<u32>,
    mtev_battery: Option<f64>,
    mct_battery: Option<f64>,
    gamma: Option<f64>,
    phi: Option<f64>,
    cost_dist: Option<f64>,
    cost_mtev: Option<f64>,
    cost_mct: Option<f64>,
}

enum Section {
    Header,
    Nodes,
    Matrix,
    Done,
}

fn num<T: std::str::FromStr>(line: usize, key: &str, raw: Option<&str>) -> Result<T> {
    let raw = raw.ok_or_else(|| Error::parse(line, format!("{key} needs a value")))?;
    raw.parse()
        .map_err(|_| Error::parse(line, format!("bad value {raw:?} for {key}")))
}

fn require<T>(v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| Error::parse(0, format!("missing {key}")))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut header = Header::default();
    let mut section = Section::Header;
    let mut nodes: Vec<Node> = Vec::new();
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut has_matrix = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or("");
        match key {
            "NODES" => {
                section = Section::Nodes;
                continue;
            }
            "MATRIX" => {
                section = Section::Matrix;
                has_matrix = true;
                continue;
            }
            "EOF" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Header => {
                let value = parts.next();
                match key {
                    "NAME" => {
                        let rest = line["NAME".len()..].trim();
                        if rest.is_empty() {
                            return Err(Error::parse(lineno, "NAME needs a value"));
                        }
                        header.name = Some(rest.to_string());
                    }
                    "SIZE" => header.size = Some(num(lineno, key, value)?),
                    "CAPACITY" => header.capacity = Some(num(lineno, key, value)?),
                    "BATTERY_MTEV" => header.mtev_battery = Some(num(lineno, key, value)?),
                    "BATTERY_MCT" => header.mct_battery = Some(num(lineno, key, value)?),
                    "GAMMA" => header.gamma = Some(num(lineno, key, value)?),
                    "PHI" => header.phi = Some(num(lineno, key, value)?),
                    "COST_DIST" => header.cost_dist = Some(num(lineno, key, value)?),
                    "COST_MTEV" => header.cost_mtev = Some(num(lineno, key, value)?),
                    "COST_MCT" => header.cost_mct = Some(num(lineno, key, value)?),
                    other => return Err(Error::parse(lineno, format!("unknown keyword {other}"))),
                }
            }
            Section::Nodes => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                let node = match fields.len() {
                    4 => Node::new(
                        num(lineno, "node id", Some(fields[0]))?,
                        num(lineno, "x", Some(fields[1]))?,
                        num(lineno, "y", Some(fields[2]))?,
                        num(lineno, "demand", Some(fields[3]))?,
                    ),
                    2 => Node::new(
                        num(lineno, "node id", Some(fields[0]))?,
                        0.0,
                        0.0,
                        num(lineno, "demand", Some(fields[1]))?,
                    ),
                    _ => return Err(Error::parse(lineno, "node line needs `id x y demand` or `id demand`")),
                };
                if node.id != nodes.len() {
                    return Err(Error::parse(
                        lineno,
                        format!("expected node id {}, got {}", nodes.len(), node.id),
                    ));
                }
                nodes.push(node);
            }
            Section::Matrix => {
                let row = line
                    .split_whitespace()
                    .map(|f| num::<i64>(lineno, "distance", Some(f)))
                    .collect::<Result<Vec<_>>>()?;
                if row.len() != rows.len() + 1 {
                    return Err(Error::parse(
                        lineno,
                        format!("matrix row {} must have {} entries", rows.len(), rows.len() + 1),
                    ));
                }
                rows.push(row);
            }
            Section::Done => return Err(Error::parse(lineno, "content after EOF")),
        }
    }

    if !matches!(section, Section::Done) {
        return Err(Error::parse(text.lines().count(), "missing EOF"));
    }
    let size = require(header.size, "SIZE")?;
    if nodes.len() != size + 1 {
        return Err(Error::parse(
            0,
            format!("SIZE {size} but {} node lines (depot included)", nodes.len()),
        ));
    }
    let params = Params {
        mtev_battery: require(header.mtev_battery, "BATTERY_MTEV")?,
        mct_battery: require(header.mct_battery, "BATTERY_MCT")?,
        gamma: require(header.gamma, "GAMMA")?,
        phi: require(header.phi, "PHI")?,
        capacity: require(header.capacity, "CAPACITY")?,
        cost_dist: require(header.cost_dist, "COST_DIST")?,
        cost_mtev: require(header.cost_mtev, "COST_MTEV")?,
        cost_mct: require(header.cost_mct, "COST_MCT")?,
    };
    let name = require(header.name, "NAME")?;
    let built = if has_matrix {
        if rows.len() != nodes.len() {
            return Err(Error::parse(0, format!("matrix needs {} rows", nodes.len())));
        }
        let n = nodes.len();
        let mut full = vec![vec![0i64; n]; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                full[i][j] = d;
                full[j][i] = d;
            }
        }
        Instance::from_matrix(name, nodes, full, params)
    } else {
        Instance::from_coords(name, nodes, params)
    };
    built.map_err(|e| match e {
        Error::Invalid(msg) => Error::parse(0, msg),
        other => other,
    })
}

pub fn write_instance(inst: &Instance) -> String {
    let p = &inst.params;
    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", inst.name);
    let _ = writeln!(out, "SIZE {}", inst.n_customers());
    let _ = writeln!(out, "CAPACITY {}", p.capacity);
    let _ = writeln!(out, "BATTERY_MTEV {}", p.mtev_battery);
    let _ = writeln!(out, "BATTERY_MCT {}", p.mct_battery);
    let _ = writeln!(out, "GAMMA {}", p.gamma);
    let _ = writeln!(out, "PHI {}", p.phi);
    let _ = writeln!(out, "COST_DIST {}", p.cost_dist);
    let _ = writeln!(out, "COST_MTEV {}", p.cost_mtev);
    let _ = writeln!(out, "COST_MCT {}", p.cost_mct);
    let _ = writeln!(out, "NODES");
    if inst.has_explicit_matrix() {
        for n in &inst.nodes {
            let _ = writeln!(out, "{} {}", n.id, n.demand);
        }
        let _ = writeln!(out, "MATRIX");
        for i in 0..inst.nodes.len() {
            let row: Vec<String> = (0..=i).map(|j| inst.dist(i, j).to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
    } else {
        for n in &inst.nodes {
            let _ = writeln!(out, "{} {} {} {}", n.id, n.x, n.y, n.demand);
        }
    }
    out.push_str("EOF\n");
    out
}
