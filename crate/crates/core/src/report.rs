//! Normalized estimates and the TSV report format shared by sampling and
//! exhaustive enumeration.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::host::HostGraph;
use crate::sampler::SampleAccumulator;
use crate::store::GraphetteTable;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphetteFrequency {
    pub canonical_id: u32,
    pub bits: u64,
    pub connected: bool,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitFrequency {
    pub orbit_id: u32,
    pub canonical_id: u32,
    pub count: u64,
    pub frequency: f64,
}

/// Orbit degree vector of one host node; only nonzero orbits are listed.
#[derive(Clone, Debug, PartialEq)]
pub struct OdvRow {
    pub node: u32,
    /// Samples containing the node (the row sum).
    pub samples: u64,
    pub counts: Vec<(u32, u64)>,
}

impl OdvRow {
    /// Counts divided by the number of samples containing the node.
    pub fn normalized(&self) -> Vec<(u32, f64)> {
        self.counts
            .iter()
            .map(|&(o, c)| (o, c as f64 / self.samples as f64))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub k: usize,
    pub samples: u64,
    pub total_orbits: u32,
    /// Every canonical, in ID order.
    pub graphettes: Vec<GraphetteFrequency>,
    /// Every global orbit, in ID order.
    pub orbits: Vec<OrbitFrequency>,
    /// Nodes that appeared in at least one sample, ascending.
    pub odv: Vec<OdvRow>,
}

/// Graphette frequencies are `count / N`, orbit frequencies `count / (k N)`.
pub fn estimate(acc: &SampleAccumulator, table: &GraphetteTable) -> Result<Report> {
    if acc.samples() == 0 {
        return Err(Error::NoSamples);
    }
    if acc.k() != table.k() || acc.graphette_counts().len() != table.canonical_count() {
        return Err(Error::SizeMismatch {
            expected: table.k(),
            found: acc.k(),
        });
    }
    let n = acc.samples() as f64;
    let cat = table.catalog();
    let graphettes = acc
        .graphette_counts()
        .iter()
        .enumerate()
        .map(|(id, &count)| GraphetteFrequency {
            canonical_id: id as u32,
            bits: cat.canonicals()[id],
            connected: cat.is_connected(id),
            count,
            frequency: count as f64 / n,
        })
        .collect();
    let kn = n * acc.k() as f64;
    let orbits = acc
        .orbit_counts()
        .iter()
        .enumerate()
        .map(|(o, &count)| OrbitFrequency {
            orbit_id: o as u32,
            canonical_id: table.orbits().canonical_of(o as u32) as u32,
            count,
            frequency: count as f64 / kn,
        })
        .collect();
    let mut odv: Vec<OdvRow> = Vec::new();
    for (node, orbit, count) in acc.odv_entries() {
        match odv.last_mut() {
            Some(row) if row.node == node => {
                row.samples += count;
                row.counts.push((orbit, count));
            }
            _ => odv.push(OdvRow {
                node,
                samples: count,
                counts: vec![(orbit, count)],
            }),
        }
    }
    Ok(Report {
        k: acc.k(),
        samples: acc.samples(),
        total_orbits: table.total_orbits(),
        graphettes,
        orbits,
        odv,
    })
}

impl Report {
    /// Connected graphettes only, renormalized over connected samples.
    pub fn graphlet_view(&self) -> Vec<GraphetteFrequency> {
        let connected: u64 = self.graphettes.iter().filter(|g| g.connected).map(|g| g.count).sum();
        self.graphettes
            .iter()
            .filter(|g| g.connected)
            .map(|g| GraphetteFrequency {
                frequency: if connected == 0 {
                    0.0
                } else {
                    g.count as f64 / connected as f64
                },
                ..g.clone()
            })
            .collect()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.graphettes.iter().map(|g| g.frequency).collect()
    }

    /// L1 distance between the graphette frequency vectors of two reports.
    pub fn l1_distance(&self, other: &Report) -> f64 {
        self.graphettes
            .iter()
            .zip(&other.graphettes)
            .map(|(a, b)| (a.frequency - b.frequency).abs())
            .sum()
    }

    /// Writes the three sections. ODV rows cover every host node, columns every orbit.
    pub fn write_tsv<W: Write>(&self, mut w: W, host: &HostGraph) -> io::Result<()> {
        writeln!(w, "# k\t{}", self.k)?;
        writeln!(w, "# samples\t{}", self.samples)?;
        writeln!(w, "## graphettes")?;
        writeln!(w, "canonical_id\tbits\tconnected\tcount\tfrequency")?;
        for g in &self.graphettes {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}",
                g.canonical_id, g.bits, g.connected as u8, g.count, g.frequency
            )?;
        }
        writeln!(w, "## orbits")?;
        writeln!(w, "orbit_id\tcanonical_id\tcount\tfrequency")?;
        for o in &self.orbits {
            writeln!(w, "{}\t{}\t{}\t{}", o.orbit_id, o.canonical_id, o.count, o.frequency)?;
        }
        writeln!(w, "## odv")?;
        write!(w, "node\tsamples")?;
        for o in 0..self.total_orbits {
            write!(w, "\to{o}")?;
        }
        writeln!(w)?;
        let mut rows = self.odv.iter().peekable();
        let mut line = vec![0u64; self.total_orbits as usize];
        for node in 0..host.node_count() {
            line.iter_mut().for_each(|c| *c = 0);
            let mut samples = 0;
            if let Some(row) = rows.next_if(|r| r.node as usize == node) {
                samples = row.samples;
                for &(o, c) in &row.counts {
                    line[o as usize] = c;
                }
            }
            write!(w, "{}\t{}", host.name(node), samples)?;
            for c in &line {
                write!(w, "\t{c}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::{exhaustive_enumerate, sample, SamplingStrategy, DEFAULT_ENUMERATION_BOUND};

    #[test]
    fn empty_host_is_all_canonical_zero() {
        let t = GraphetteTable::build(4, 1, 1).unwrap();
        let host = HostGraph::empty(12).unwrap();
        let acc = sample(&host, &t, SamplingStrategy::Uniform, 500, 1, 1).unwrap();
        let r = estimate(&acc, &t).unwrap();
        assert_eq!(r.graphettes[0].frequency, 1.0);
        assert!(r.graphlet_view().iter().all(|g| g.frequency == 0.0));
    }

    #[test]
    fn complete_host_is_all_complete_graphette() {
        let t = GraphetteTable::build(4, 1, 1).unwrap();
        let host = HostGraph::complete(6).unwrap();
        let acc = sample(&host, &t, SamplingStrategy::LocalExpansion, 500, 1, 1).unwrap();
        let r = estimate(&acc, &t).unwrap();
        let k4 = t.catalog().id_of(63).unwrap();
        assert_eq!(r.graphettes[k4].frequency, 1.0);
        assert_eq!(r.graphlet_view().iter().find(|g| g.bits == 63).unwrap().frequency, 1.0);
        for row in &r.odv {
            assert_eq!(row.normalized(), vec![(t.orbits().base(k4), 1.0)]);
        }
    }

    #[test]
    fn no_samples() {
        let t = GraphetteTable::build(3, 1, 1).unwrap();
        let acc = SampleAccumulator::new(&t);
        assert!(matches!(estimate(&acc, &t), Err(Error::NoSamples)));
    }

    #[test]
    fn tsv_layout() {
        let t = GraphetteTable::build(3, 1, 1).unwrap();
        let host = HostGraph::parse_edge_list("a b\nb c\nc d\n").unwrap();
        let acc = exhaustive_enumerate(&host, &t, DEFAULT_ENUMERATION_BOUND).unwrap();
        let r = estimate(&acc, &t).unwrap();
        let mut out = Vec::new();
        r.write_tsv(&mut out, &host).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# k\t3");
        assert_eq!(lines[1], "# samples\t4");
        assert_eq!(lines[3], "canonical_id\tbits\tconnected\tcount\tfrequency");
        assert_eq!(lines[4], "0\t0\t0\t0\t0");
        // a-b-c and b-c-d are paths, a-b-d and a-c-d one edge
        assert_eq!(lines[5], "1\t1\t0\t2\t0.5");
        assert_eq!(lines[6], "2\t3\t1\t2\t0.5");
        let odv_header = lines.iter().position(|l| l.starts_with("node\t")).unwrap();
        assert_eq!(lines[odv_header], "node\tsamples\to0\to1\to2\to3\to4\to5");
        assert_eq!(lines.len(), odv_header + 1 + 4);
        assert!(lines[odv_header + 1].starts_with("a\t3\t"));
    }
}
