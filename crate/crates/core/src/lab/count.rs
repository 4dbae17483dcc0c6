//! Exact `|F * A|` over `F_p`.
//!
//! Points are packed as `x·p + y`. Each worker takes a contiguous slice of
//! the maps and produces sorted, deduplicated runs; a run is written to a
//! temporary file once the in-memory buffer passes the spill threshold. The
//! final count is a k-way merge of all runs, so it does not depend on how
//! the maps were split.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};

use crate::error::LabError;
use crate::lab::FpMap;
use crate::plane::PlaneMap;

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub workers: usize,
    /// Buffered points per worker before a run is spilled to disk.
    pub spill_threshold: usize,
    /// Return the sorted image along with its size.
    pub keep_image: bool,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            workers: 1,
            spill_threshold: 1 << 23,
            keep_image: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActCount {
    pub count: u64,
    /// Packed points `x·p + y`, ascending.
    pub image: Option<Vec<u64>>,
}

enum Run {
    Memory(Vec<u64>),
    Disk(File),
}

/// `|{f(a) : f ∈ maps, a ∈ points}|` for maps over `F_p` and points given
/// as residue pairs.
pub fn act_count(maps: &[PlaneMap], points: &[[u64; 2]], opts: &CountOptions) -> Result<ActCount, LabError> {
    let Some(first) = maps.first() else {
        return Ok(ActCount {
            count: 0,
            image: opts.keep_image.then(Vec::new),
        });
    };
    let p = first.field().characteristic();
    let compiled: Vec<FpMap> = maps.iter().map(FpMap::new).collect::<Result<_, _>>()?;
    let workers = opts.workers.max(1).min(compiled.len());
    let chunk = compiled.len().div_ceil(workers);
    let threshold = opts.spill_threshold.max(1);

    let results: Vec<Result<Vec<Run>, LabError>> = std::thread::scope(|s| {
        let handles: Vec<_> = compiled
            .chunks(chunk)
            .map(|part| s.spawn(move || worker_runs(part, points, p, threshold)))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut runs = Vec::new();
    for r in results {
        runs.extend(r?);
    }
    merge_runs(runs, opts.keep_image)
}

fn worker_runs(maps: &[FpMap], points: &[[u64; 2]], p: u64, threshold: usize) -> Result<Vec<Run>, LabError> {
    let mut runs = Vec::new();
    let mut buf: Vec<u64> = Vec::with_capacity(threshold.min(maps.len() * points.len()));
    for f in maps {
        for a in points {
            let [u, v] = f.apply(a[0], a[1]);
            buf.push(u * p + v);
            if buf.len() >= threshold {
                buf.sort_unstable();
                buf.dedup();
                runs.push(Run::Disk(spill(&buf)?));
                buf.clear();
            }
        }
    }
    buf.sort_unstable();
    buf.dedup();
    runs.push(Run::Memory(buf));
    Ok(runs)
}

fn spill(run: &[u64]) -> Result<File, LabError> {
    let file = tempfile::tempfile()?;
    let mut w = BufWriter::new(file);
    for v in run {
        w.write_all(&v.to_le_bytes())?;
    }
    let mut file = w.into_inner().map_err(|e| e.into_error())?;
    std::io::Seek::rewind(&mut file)?;
    Ok(file)
}

/// Sorted values of one run, read lazily.
enum RunIter {
    Memory(std::vec::IntoIter<u64>),
    Disk(BufReader<File>),
}

impl RunIter {
    fn next_value(&mut self) -> Result<Option<u64>, LabError> {
        match self {
            RunIter::Memory(it) => Ok(it.next()),
            RunIter::Disk(r) => {
                let mut bytes = [0u8; 8];
                match r.read_exact(&mut bytes) {
                    Ok(()) => Ok(Some(u64::from_le_bytes(bytes))),
                    Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => Ok(None),
                    Err(e) => Err(e.into()),
                }
            }
        }
    }
}

fn merge_runs(runs: Vec<Run>, keep: bool) -> Result<ActCount, LabError> {
    let mut iters: Vec<RunIter> = runs
        .into_iter()
        .map(|r| match r {
            Run::Memory(v) => RunIter::Memory(v.into_iter()),
            Run::Disk(f) => RunIter::Disk(BufReader::new(f)),
        })
        .collect();
    let mut heap = BinaryHeap::new();
    for (i, it) in iters.iter_mut().enumerate() {
        if let Some(v) = it.next_value()? {
            heap.push(Reverse((v, i)));
        }
    }
    let mut count = 0u64;
    let mut last = None;
    let mut image = keep.then(Vec::new);
    while let Some(Reverse((v, i))) = heap.pop() {
        if last != Some(v) {
            count += 1;
            last = Some(v);
            if let Some(img) = image.as_mut() {
                img.push(v);
            }
        }
        if let Some(next) = iters[i].next_value()? {
            heap.push(Reverse((next, i)));
        }
    }
    Ok(ActCount { count, image })
}
