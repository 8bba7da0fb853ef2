//! Storage placement from a verified design.
//!
//! Chunks are ranked by popularity (label 0 is the most popular). Each block
//! becomes a server holding the chunks of its labels, and each parallel class
//! becomes a location whose servers together hold every chunk exactly once.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::design::{min_sum, ResolvableDesign, SystemKind};
use crate::error::{Error, Result};
use crate::verify::{verify_structure, Check, VerificationReport, Witness};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChunkEntry {
    pub id: String,
    /// Higher is more popular.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChunkCatalog {
    entries: Vec<ChunkEntry>,
}

impl ChunkCatalog {
    /// Ids must be unique, nonempty and free of whitespace; scores must be
    /// finite and non-negative.
    pub fn new(entries: Vec<ChunkEntry>) -> Result<ChunkCatalog> {
        let mut seen = HashSet::new();
        for e in &entries {
            if e.id.is_empty() || e.id.chars().any(char::is_whitespace) {
                return Err(Error::Catalog(format!(
                    "chunk id {:?} must be nonempty without whitespace",
                    e.id
                )));
            }
            if !e.score.is_finite() || e.score < 0.0 {
                return Err(Error::Catalog(format!(
                    "chunk {} has invalid score {}",
                    e.id, e.score
                )));
            }
            if !seen.insert(e.id.as_str()) {
                return Err(Error::Catalog(format!("duplicate chunk id {}", e.id)));
            }
        }
        Ok(ChunkCatalog { entries })
    }

    /// Chunks `"0"`, `"1"`, ... with strictly decreasing scores, so chunk
    /// `"i"` gets label `i`.
    pub fn identity(n: u32) -> ChunkCatalog {
        ChunkCatalog::new(
            (0..n)
                .map(|i| ChunkEntry {
                    id: i.to_string(),
                    score: f64::from(n - i),
                })
                .collect(),
        )
        .expect("identity catalog is valid")
    }

    /// Parses `id,score` records; a leading `id,score` header is skipped.
    pub fn from_csv(text: &str) -> Result<ChunkCatalog> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut entries = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            if record.len() != 2 {
                return Err(Error::Catalog(format!(
                    "line {}: expected `id,score`, got {} fields",
                    i + 1,
                    record.len()
                )));
            }
            if i == 0 && &record[0] == "id" && &record[1] == "score" {
                continue;
            }
            let score = record[1].parse::<f64>().map_err(|_| {
                Error::Catalog(format!("line {}: bad score {:?}", i + 1, &record[1]))
            })?;
            entries.push(ChunkEntry {
                id: record[0].to_string(),
                score,
            });
        }
        ChunkCatalog::new(entries)
    }

    pub fn entries(&self) -> &[ChunkEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Chunk ids indexed by their popularity label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking {
    by_label: Vec<String>,
}

impl Ranking {
    pub fn id(&self, label: u32) -> &str {
        &self.by_label[label as usize]
    }

    pub fn label(&self, id: &str) -> Option<u32> {
        self.by_label.iter().position(|x| x == id).map(|i| i as u32)
    }

    pub fn as_map(&self) -> BTreeMap<String, u32> {
        self.by_label
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect()
    }
}

/// Labels by descending score, ties broken by ascending id.
pub fn rank_chunks(catalog: &ChunkCatalog, order: u32) -> Result<Ranking> {
    if catalog.len() != order as usize {
        return Err(Error::Catalog(format!(
            "catalog has {} chunks, design order is {order}",
            catalog.len()
        )));
    }
    let mut entries: Vec<&ChunkEntry> = catalog.entries().iter().collect();
    entries.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    Ok(Ranking {
        by_label: entries.into_iter().map(|e| e.id.clone()).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Server {
    pub name: String,
    pub chunks: Vec<String>,
    pub labels: Vec<u32>,
    pub sum: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Location {
    pub name: String,
    pub servers: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PlacementPlan {
    pub order: u32,
    pub block_size: u32,
    pub servers: Vec<Server>,
    pub locations: Vec<Location>,
}

impl PlacementPlan {
    pub fn min_server_sum(&self) -> Option<u64> {
        self.servers.iter().map(|s| s.sum).min()
    }

    pub fn server(&self, name: &str) -> Option<&Server> {
        self.servers.iter().find(|s| s.name == name)
    }
}

/// `A`, ..., `Z`, `AA`, `AB`, ... for 0, 1, ...
pub fn server_name(mut index: usize) -> String {
    let mut name = Vec::new();
    loop {
        name.push(b'A' + (index % 26) as u8);
        if index < 26 {
            break;
        }
        index = index / 26 - 1;
    }
    name.reverse();
    String::from_utf8(name).unwrap()
}

/// Roman numeral for `value >= 1`; thousands repeat `M` without limit.
pub fn roman(mut value: usize) -> String {
    const TABLE: [(usize, &str); 13] = [
        (1000, "M"),
        (900, "CM"),
        (500, "D"),
        (400, "CD"),
        (100, "C"),
        (90, "XC"),
        (50, "L"),
        (40, "XL"),
        (10, "X"),
        (9, "IX"),
        (5, "V"),
        (4, "IV"),
        (1, "I"),
    ];
    let mut out = String::new();
    for &(v, s) in &TABLE {
        while value >= v {
            out.push_str(s);
            value -= v;
        }
    }
    out
}

/// One server per block, one location per parallel class.
///
/// Servers are named in lexicographic block order over the whole design.
/// Locations are numbered by their lexicographically smallest block and list
/// their servers by name, so names depend only on the set of classes.
pub fn plan_from_design(design: &ResolvableDesign, catalog: &ChunkCatalog) -> Result<PlacementPlan> {
    let report = verify_structure(design);
    if !report.passed {
        return Err(Error::PreconditionFailed {
            context: "placement needs a verified design".into(),
            report: Box::new(report),
        });
    }
    let ranking = rank_chunks(catalog, design.order())?;

    let mut blocks: Vec<(crate::design::Block, usize)> = design
        .classes()
        .iter()
        .enumerate()
        .flat_map(|(ci, c)| c.blocks().iter().map(move |&b| (b, ci)))
        .collect();
    blocks.sort_unstable();

    let mut servers = Vec::with_capacity(blocks.len());
    let mut members: Vec<Vec<String>> = vec![Vec::new(); design.classes().len()];
    for (i, (block, ci)) in blocks.iter().enumerate() {
        let name = server_name(i);
        members[*ci].push(name.clone());
        servers.push(Server {
            name,
            chunks: block.elements().iter().map(|&l| ranking.id(l).to_string()).collect(),
            labels: block.elements().to_vec(),
            sum: block.sum(),
        });
    }

    // Blocks were visited in lexicographic order, so each class's first
    // member is its smallest block; ordering by that index orders classes.
    let mut firsts: Vec<(usize, usize)> = design
        .classes()
        .iter()
        .enumerate()
        .map(|(ci, _)| {
            let first = blocks.iter().position(|&(_, c)| c == ci).unwrap_or(usize::MAX);
            (first, ci)
        })
        .collect();
    firsts.sort_unstable();
    let locations = firsts
        .into_iter()
        .enumerate()
        .map(|(i, (_, ci))| Location {
            name: roman(i + 1),
            servers: std::mem::take(&mut members[ci]),
        })
        .collect();

    let plan = PlacementPlan {
        order: design.order(),
        block_size: design.block_size(),
        servers,
        locations,
    };
    let floor = min_sum(design)?;
    let report = check_plan(&plan, design.kind(), floor);
    if !report.passed {
        return Err(Error::PostconditionFailed {
            context: "placement plan".into(),
            report: Box::new(report),
        });
    }
    Ok(plan)
}

/// Re-derives the placement guarantees from the plan's own contents.
pub fn check_plan(plan: &PlacementPlan, kind: SystemKind, min_sum: u64) -> VerificationReport {
    let n = plan.order;
    let mut index: HashMap<&str, u32> = HashMap::new();
    for s in &plan.servers {
        for c in &s.chunks {
            let next = index.len() as u32;
            index.entry(c.as_str()).or_insert(next);
        }
    }

    let mut chunk_count = Check::new("chunk_count");
    if index.len() != n as usize {
        chunk_count.fail(Witness::Count {
            observed: index.len() as u64,
            expected: u64::from(n),
        });
    }
    let nu = index.len();

    let mut replication = Check::new("replication");
    let expected_r = kind.expected_replication(n);
    let mut per_chunk = vec![0u64; nu];
    let mut pairs = vec![0u64; nu * nu];
    let mut triples: HashMap<[u32; 3], u64> = HashMap::new();
    for s in &plan.servers {
        let ids: Vec<u32> = s.chunks.iter().map(|c| index[c.as_str()]).collect();
        for (i, &x) in ids.iter().enumerate() {
            per_chunk[x as usize] += 1;
            for (j, &y) in ids.iter().enumerate().skip(i + 1) {
                let (a, b) = (x.min(y) as usize, x.max(y) as usize);
                pairs[a * nu + b] += 1;
                if kind == SystemKind::Quadruple {
                    for &z in &ids[j + 1..] {
                        let mut t = [x, y, z];
                        t.sort_unstable();
                        *triples.entry(t).or_default() += 1;
                    }
                }
            }
        }
    }
    let ids_by_index = {
        let mut v = vec![""; nu];
        for (&id, &i) in &index {
            v[i as usize] = id;
        }
        v
    };
    for (i, &r) in per_chunk.iter().enumerate() {
        if r != expected_r {
            replication.fail(Witness::Message {
                text: format!("chunk {} is on {r} servers, expected {expected_r}", ids_by_index[i]),
            });
        }
    }

    let mut co_residence = Check::new("co_residence");
    let expected_pair = kind.expected_pair_multiplicity(n);
    for a in 0..nu {
        for b in a + 1..nu {
            let c = pairs[a * nu + b];
            if c != expected_pair {
                co_residence.fail(Witness::Message {
                    text: format!(
                        "chunks {} and {} share {c} servers, expected {expected_pair}",
                        ids_by_index[a], ids_by_index[b]
                    ),
                });
            }
        }
    }
    let mut checks = vec![chunk_count, replication, co_residence];
    if kind == SystemKind::Quadruple {
        let mut triple_check = Check::new("triple_co_residence");
        let expected = u64::from(n) * u64::from(n.saturating_sub(1)) * u64::from(n.saturating_sub(2)) / 6;
        if triples.len() as u64 != expected {
            triple_check.fail(Witness::Count {
                observed: triples.len() as u64,
                expected,
            });
        }
        for (t, &c) in &triples {
            if c != 1 {
                triple_check.fail(Witness::Message {
                    text: format!("chunks {t:?} share {c} servers"),
                });
            }
        }
        checks.push(triple_check);
    }

    let mut location_cover = Check::new("location_coverage");
    let by_name: HashMap<&str, &Server> =
        plan.servers.iter().map(|s| (s.name.as_str(), s)).collect();
    for (li, loc) in plan.locations.iter().enumerate() {
        let mut seen = vec![0u32; nu];
        for name in &loc.servers {
            match by_name.get(name.as_str()) {
                Some(s) => s.chunks.iter().for_each(|c| seen[index[c.as_str()] as usize] += 1),
                None => location_cover.fail(Witness::Message {
                    text: format!("location {} names unknown server {name}", loc.name),
                }),
            }
        }
        for (i, &count) in seen.iter().enumerate() {
            if count != 1 {
                location_cover.fail(Witness::ClassPoint {
                    class: li + 1,
                    point: i as u32,
                    count,
                });
            }
        }
    }

    let mut sums = Check::new("server_sums");
    for s in &plan.servers {
        let recomputed: u64 = s.labels.iter().map(|&l| u64::from(l)).sum();
        if recomputed != s.sum || s.sum < min_sum {
            sums.fail(Witness::Message {
                text: format!("server {} has sum {} (labels give {recomputed}, floor {min_sum})", s.name, s.sum),
            });
        }
    }
    checks.push(location_cover);
    checks.push(sums);
    VerificationReport::new(checks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanFormat {
    Table,
    Csv,
    Structured,
}

impl FromStr for PlanFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<PlanFormat> {
        match s {
            "table" => Ok(PlanFormat::Table),
            "csv" => Ok(PlanFormat::Csv),
            "structured" | "json" => Ok(PlanFormat::Structured),
            other => Err(Error::Format(other.to_string())),
        }
    }
}

pub fn export_plan(plan: &PlacementPlan, format: PlanFormat) -> Result<String> {
    match format {
        PlanFormat::Table => Ok(render_table(plan)),
        PlanFormat::Csv => render_csv(plan),
        PlanFormat::Structured => {
            let mut s = serde_json::to_string_pretty(plan)?;
            s.push('\n');
            Ok(s)
        }
    }
}

fn render_table(plan: &PlacementPlan) -> String {
    let rows: Vec<[String; 3]> = plan
        .servers
        .iter()
        .map(|s| [s.name.clone(), s.chunks.join(", "), s.sum.to_string()])
        .collect();
    let head = ["Server", "Chunks of Data", "Sum of Popularity"];
    let mut w = head.map(str::len);
    for r in &rows {
        for (i, c) in r.iter().enumerate() {
            w[i] = w[i].max(c.len());
        }
    }
    let mut out = String::new();
    let rule = |w: &[usize]| {
        let mut s = String::from("+");
        for &x in w {
            s.push_str(&"-".repeat(x + 2));
            s.push('+');
        }
        s.push('\n');
        s
    };
    out.push_str(&rule(&w));
    let _ = writeln!(out, "| {:<w0$} | {:<w1$} | {:<w2$} |", head[0], head[1], head[2], w0 = w[0], w1 = w[1], w2 = w[2]);
    out.push_str(&rule(&w));
    for r in &rows {
        let _ = writeln!(out, "| {:<w0$} | {:<w1$} | {:>w2$} |", r[0], r[1], r[2], w0 = w[0], w1 = w[1], w2 = w[2]);
    }
    out.push_str(&rule(&w));
    out.push('\n');

    let lrows: Vec<[String; 2]> = plan
        .locations
        .iter()
        .map(|l| [l.name.clone(), l.servers.join(", ")])
        .collect();
    let lhead = ["Location", "Servers"];
    let mut lw = lhead.map(str::len);
    for r in &lrows {
        for (i, c) in r.iter().enumerate() {
            lw[i] = lw[i].max(c.len());
        }
    }
    out.push_str(&rule(&lw));
    let _ = writeln!(out, "| {:<w0$} | {:<w1$} |", lhead[0], lhead[1], w0 = lw[0], w1 = lw[1]);
    out.push_str(&rule(&lw));
    for r in &lrows {
        let _ = writeln!(out, "| {:<w0$} | {:<w1$} |", r[0], r[1], w0 = lw[0], w1 = lw[1]);
    }
    out.push_str(&rule(&lw));
    out
}

fn render_csv(plan: &PlacementPlan) -> Result<String> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    w.write_record(["server", "chunks", "sum"])?;
    for s in &plan.servers {
        w.write_record([s.name.as_str(), &s.chunks.join(" "), &s.sum.to_string()])?;
    }
    w.write_record(["location", "servers"])?;
    for l in &plan.locations {
        w.write_record([l.name.as_str(), &l.servers.join(" ")])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Reads a plan back from its csv export; labels come from ranking `catalog`.
pub fn parse_plan_csv(text: &str, catalog: &ChunkCatalog) -> Result<PlacementPlan> {
    let ranking = rank_chunks(catalog, catalog.len() as u32)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut servers = Vec::new();
    let mut locations = Vec::new();
    #[derive(Clone, Copy)]
    enum Section {
        Servers,
        Locations,
    }
    let mut section = None;
    for record in reader.records() {
        let r = record?;
        match (r.get(0), r.len()) {
            (Some("server"), 3) if &r[1] == "chunks" => section = Some(Section::Servers),
            (Some("location"), 2) if &r[1] == "servers" => section = Some(Section::Locations),
            _ => match section {
                Some(Section::Servers) if r.len() == 3 => {
                    let chunks: Vec<String> = r[1].split(' ').map(str::to_string).collect();
                    let labels = chunks
                        .iter()
                        .map(|c| {
                            ranking
                                .label(c)
                                .ok_or_else(|| Error::Parse(format!("unknown chunk {c}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let sum = r[2]
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad sum {:?}", &r[2])))?;
                    servers.push(Server {
                        name: r[0].to_string(),
                        chunks,
                        labels,
                        sum,
                    });
                }
                Some(Section::Locations) if r.len() == 2 => locations.push(Location {
                    name: r[0].to_string(),
                    servers: r[1].split(' ').map(str::to_string).collect(),
                }),
                _ => return Err(Error::Parse(format!("unexpected csv record {r:?}"))),
            },
        }
    }
    let block_size = servers.first().map_or(0, |s| s.chunks.len() as u32);
    Ok(PlacementPlan {
        order: catalog.len() as u32,
        block_size,
        servers,
        locations,
    })
}
