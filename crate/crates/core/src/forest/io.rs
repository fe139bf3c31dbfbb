//! Little-endian binary model format.
//!
//! ```text
//! magic      8 bytes  "LSFOREST"
//! version    u32      1
//! dim        u32
//! n_classes  u32
//! n_trees    u32
//! trees_param u32     trees requested at training time
//! max_depth  u32      u32::MAX = unlimited
//! max_leaves u32      u32::MAX = unlimited
//! min_split  u32
//! mtry       u32      u32::MAX = ceil(sqrt(dim))
//! bootstrap  u8       0 | 1
//! seed       u64
//! per tree:
//!   n_nodes  u32
//!   per node (breadth-first, root first):
//!     tag 0 (internal): feature u32, threshold f64, left u32, right u32
//!     tag 1 (leaf):     n u32, then n x (class u32, count u32)
//! ```

use std::io::{Read, Write};

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use super::model::{Forest, ForestParams};
use super::tree::{RawNode, Tree, TreeParams};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"LSFOREST";
pub const FORMAT_VERSION: u32 = 1;

const NONE: u32 = u32::MAX;
const LEAF: u32 = u32::MAX;

fn opt_out(v: Option<usize>) -> Result<u32> {
    match v {
        None => Ok(NONE),
        Some(v) if v < NONE as usize => Ok(v as u32),
        Some(v) => Err(Error::InvalidConfig(format!("parameter {v} does not fit the model format"))),
    }
}

fn opt_in(v: u32) -> Option<usize> {
    (v != NONE).then_some(v as usize)
}

fn small(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::InvalidConfig(format!("{what} {v} does not fit the model format")))
}

impl Forest {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        let p = &self.params;
        w.write_all(MAGIC)?;
        w.write_u32::<LE>(FORMAT_VERSION)?;
        w.write_u32::<LE>(small(self.dim, "dimension")?)?;
        w.write_u32::<LE>(small(self.n_classes, "class count")?)?;
        w.write_u32::<LE>(small(self.trees.len(), "tree count")?)?;
        w.write_u32::<LE>(small(p.trees, "tree count")?)?;
        w.write_u32::<LE>(opt_out(p.tree.max_depth)?)?;
        w.write_u32::<LE>(opt_out(p.tree.max_leaves)?)?;
        w.write_u32::<LE>(small(p.tree.min_samples_split, "min_samples_split")?)?;
        w.write_u32::<LE>(opt_out(p.tree.features_per_split)?)?;
        w.write_u8(p.bootstrap as u8)?;
        w.write_u64::<LE>(p.seed)?;
        for t in &self.trees {
            w.write_u32::<LE>(t.nodes.len() as u32)?;
            for n in &t.nodes {
                if n.feature == LEAF {
                    w.write_u8(1)?;
                    w.write_u32::<LE>(n.b)?;
                    for &(c, k) in &t.histograms[n.a as usize..(n.a + n.b) as usize] {
                        w.write_u32::<LE>(c)?;
                        w.write_u32::<LE>(k)?;
                    }
                } else {
                    w.write_u8(0)?;
                    w.write_u32::<LE>(n.feature)?;
                    w.write_f64::<LE>(n.threshold)?;
                    w.write_u32::<LE>(n.a)?;
                    w.write_u32::<LE>(n.b)?;
                }
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    /// Reads and validates a model. Truncated input, a wrong magic or
    /// version, or inconsistent trees are rejected as malformed.
    pub fn read_from<R: Read>(mut r: R) -> Result<Forest> {
        let truncated = |e: std::io::Error| {
            if e.kind() == std::io::ErrorKind::UnexpectedEof {
                Error::Malformed("model file is truncated".into())
            } else {
                Error::Io(e)
            }
        };
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(Error::Malformed("not a forest model file".into()));
        }
        let version = r.read_u32::<LE>().map_err(truncated)?;
        if version != FORMAT_VERSION {
            return Err(Error::Malformed(format!("unsupported model format version {version}")));
        }
        let mut u32_in = || r.read_u32::<LE>().map_err(truncated);
        let dim = u32_in()? as usize;
        let n_classes = u32_in()? as usize;
        let n_trees = u32_in()? as usize;
        let trees_param = u32_in()? as usize;
        let max_depth = opt_in(u32_in()?);
        let max_leaves = opt_in(u32_in()?);
        let min_samples_split = u32_in()? as usize;
        let features_per_split = opt_in(u32_in()?);
        let bootstrap = match r.read_u8().map_err(truncated)? {
            0 => false,
            1 => true,
            b => return Err(Error::Malformed(format!("bad bootstrap flag {b}"))),
        };
        let seed = r.read_u64::<LE>().map_err(truncated)?;
        let params = ForestParams {
            trees: trees_param,
            tree: TreeParams { max_depth, max_leaves, min_samples_split, features_per_split },
            bootstrap,
            seed,
        };

        let mut trees = Vec::with_capacity(n_trees.min(4096));
        for _ in 0..n_trees {
            let n_nodes = r.read_u32::<LE>().map_err(truncated)?;
            if n_nodes == 0 {
                return Err(Error::Malformed("tree without nodes".into()));
            }
            let mut t = Tree { nodes: Vec::with_capacity((n_nodes as usize).min(1 << 20)), histograms: Vec::new() };
            for id in 0..n_nodes {
                match r.read_u8().map_err(truncated)? {
                    0 => {
                        let feature = r.read_u32::<LE>().map_err(truncated)?;
                        let threshold = r.read_f64::<LE>().map_err(truncated)?;
                        let a = r.read_u32::<LE>().map_err(truncated)?;
                        let b = r.read_u32::<LE>().map_err(truncated)?;
                        // children always follow their parent, so traversal terminates
                        if feature == LEAF || a <= id || b <= id || a >= n_nodes || b >= n_nodes || !threshold.is_finite() {
                            return Err(Error::Malformed(format!("bad internal node {id}")));
                        }
                        t.nodes.push(RawNode { feature, threshold, a, b });
                    }
                    1 => {
                        let n = r.read_u32::<LE>().map_err(truncated)?;
                        if n == 0 {
                            return Err(Error::Malformed(format!("empty leaf {id}")));
                        }
                        let offset = t.histograms.len() as u32;
                        for _ in 0..n {
                            let c = r.read_u32::<LE>().map_err(truncated)?;
                            let k = r.read_u32::<LE>().map_err(truncated)?;
                            if k == 0 {
                                return Err(Error::Malformed(format!("zero count in leaf {id}")));
                            }
                            t.histograms.push((c, k));
                        }
                        t.nodes.push(RawNode { feature: LEAF, threshold: 0.0, a: offset, b: n });
                    }
                    tag => return Err(Error::Malformed(format!("bad node tag {tag}"))),
                }
            }
            trees.push(t);
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Malformed("trailing bytes after the last tree".into()));
        }
        Forest::from_trees(params, dim, n_classes, trees)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Forest> {
        Self::read_from(bytes)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Forest> {
        let f = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(f))
    }
}
