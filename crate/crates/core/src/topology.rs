//! WAN topologies: candidate data-center sites and the links between them.
//!
//! Topologies are read from a small JSON format:
//!
//! ```json
//! {
//!   "name": "example",
//!   "propagation_speed_m_per_s": 2e8,
//!   "sites": [{"id": "A", "lat": -22.9, "lon": -43.2, "gateway": true}],
//!   "links": [{"a": "A", "b": "B", "capacity_mbps": 10000, "latency_ms": 0.65}]
//! }
//! ```
//!
//! `latency_ms` is optional per link; when absent it is derived from the
//! great-circle distance between the endpoints and the propagation speed.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Mean Earth radius used for great-circle distances.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Signal propagation speed in optical fiber.
pub const DEFAULT_PROPAGATION_SPEED_M_PER_S: f64 = 2.0e8;

#[derive(Debug, thiserror::Error)]
pub enum TopologyError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{location}: duplicate site id {id:?}")]
    DuplicateSite { location: String, id: String },
    #[error("{location}: link endpoint {id:?} is not a declared site")]
    UnknownEndpoint { location: String, id: String },
    #[error("{location}: link connects site {id:?} to itself")]
    SelfLoop { location: String, id: String },
    #[error("{location}: second link between {a:?} and {b:?}")]
    DuplicateLink {
        location: String,
        a: String,
        b: String,
    },
    #[error("{location}: capacity_mbps must be positive and finite, got {value}")]
    NonPositiveCapacity { location: String, value: f64 },
    #[error("{location}: latency_ms must be non-negative and finite, got {value}")]
    InvalidLatency { location: String, value: f64 },
    #[error("{location}: {field} {value} is out of range")]
    CoordinateOutOfRange {
        location: String,
        field: &'static str,
        value: f64,
    },
    #[error("{location}: link has no latency_ms and site {id:?} has no coordinates")]
    MissingCoordinates { location: String, id: String },
    #[error("propagation_speed_m_per_s must be positive and finite, got {0}")]
    InvalidSpeed(f64),
    #[error("topology has no gateway site")]
    NoGateway,
    #[error("unknown site id {0:?}")]
    UnknownSite(String),
}

/// A candidate data-center site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Site {
    pub id: String,
    #[serde(rename = "lat", default, skip_serializing_if = "Option::is_none")]
    pub latitude: Option<f64>,
    #[serde(rename = "lon", default, skip_serializing_if = "Option::is_none")]
    pub longitude: Option<f64>,
    pub gateway: bool,
}

impl Site {
    pub fn coordinates(&self) -> Option<(f64, f64)> {
        Some((self.latitude?, self.longitude?))
    }
}

/// An undirected link. Capacity applies independently to each direction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Link {
    pub a: String,
    pub b: String,
    pub capacity_mbps: f64,
    pub latency_ms: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkRecord {
    a: String,
    b: String,
    capacity_mbps: f64,
    #[serde(default)]
    latency_ms: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TopologyRecord {
    name: String,
    #[serde(default)]
    propagation_speed_m_per_s: Option<f64>,
    sites: Vec<Site>,
    links: Vec<LinkRecord>,
}

#[derive(Serialize)]
struct TopologyOut<'a> {
    name: &'a str,
    propagation_speed_m_per_s: f64,
    sites: &'a [Site],
    links: &'a [Link],
}

/// A validated topology. Immutable once constructed.
///
/// Sites are addressed by their position in [`Topology::sites`]; every
/// index-based accessor in this crate uses that order.
#[derive(Debug, Clone)]
pub struct Topology {
    name: String,
    propagation_speed: f64,
    sites: Vec<Site>,
    links: Vec<Link>,
    index: HashMap<String, usize>,
    // (neighbor, link index), sorted by neighbor
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl PartialEq for Topology {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.propagation_speed == other.propagation_speed
            && self.sites == other.sites
            && self.links == other.links
    }
}

/// Great-circle distance in meters (haversine).
pub fn great_circle_m(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let dlat = lat2 - lat1;
    let dlon = lon2 - lon1;
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * 1000.0 * h.sqrt().min(1.0).asin()
}

/// Propagation latency in milliseconds between two sites, or `None` if
/// either site lacks coordinates.
pub fn derive_latency(a: &Site, b: &Site, speed_m_per_s: f64) -> Option<f64> {
    let d = great_circle_m(a.coordinates()?, b.coordinates()?);
    Some(d / speed_m_per_s * 1000.0)
}

/// Reads and validates a topology file.
pub fn load_topology(path: impl AsRef<Path>) -> Result<Topology, TopologyError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TopologyError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Topology::from_json(&text)
}

impl Topology {
    pub fn from_json(text: &str) -> Result<Self, TopologyError> {
        let record: TopologyRecord =
            serde_json::from_str(text).map_err(|e| TopologyError::Parse {
                line: e.line(),
                column: e.column(),
                message: e.to_string(),
            })?;
        Self::from_record(record)
    }

    fn from_record(record: TopologyRecord) -> Result<Self, TopologyError> {
        let speed = record
            .propagation_speed_m_per_s
            .unwrap_or(DEFAULT_PROPAGATION_SPEED_M_PER_S);
        if !(speed.is_finite() && speed > 0.0) {
            return Err(TopologyError::InvalidSpeed(speed));
        }

        let mut index = HashMap::with_capacity(record.sites.len());
        for (pos, site) in record.sites.iter().enumerate() {
            let location = format!("sites[{pos}]");
            if index.insert(site.id.clone(), pos).is_some() {
                return Err(TopologyError::DuplicateSite {
                    location,
                    id: site.id.clone(),
                });
            }
            if let Some(lat) = site.latitude {
                if !(-90.0..=90.0).contains(&lat) {
                    return Err(TopologyError::CoordinateOutOfRange {
                        location,
                        field: "lat",
                        value: lat,
                    });
                }
            }
            if let Some(lon) = site.longitude {
                if !(-180.0..=180.0).contains(&lon) {
                    return Err(TopologyError::CoordinateOutOfRange {
                        location,
                        field: "lon",
                        value: lon,
                    });
                }
            }
        }

        let mut seen = HashSet::new();
        let mut links = Vec::with_capacity(record.links.len());
        for (pos, link) in record.links.into_iter().enumerate() {
            let location = format!("links[{pos}]");
            let ia = *index
                .get(&link.a)
                .ok_or_else(|| TopologyError::UnknownEndpoint {
                    location: location.clone(),
                    id: link.a.clone(),
                })?;
            let ib = *index
                .get(&link.b)
                .ok_or_else(|| TopologyError::UnknownEndpoint {
                    location: location.clone(),
                    id: link.b.clone(),
                })?;
            if ia == ib {
                return Err(TopologyError::SelfLoop {
                    location,
                    id: link.a,
                });
            }
            if !seen.insert((ia.min(ib), ia.max(ib))) {
                return Err(TopologyError::DuplicateLink {
                    location,
                    a: link.a,
                    b: link.b,
                });
            }
            if !(link.capacity_mbps.is_finite() && link.capacity_mbps > 0.0) {
                return Err(TopologyError::NonPositiveCapacity {
                    location,
                    value: link.capacity_mbps,
                });
            }
            let latency_ms = match link.latency_ms {
                Some(v) if v.is_finite() && v >= 0.0 => v,
                Some(v) => return Err(TopologyError::InvalidLatency { location, value: v }),
                None => {
                    let (sa, sb) = (&record.sites[ia], &record.sites[ib]);
                    let missing = if sa.coordinates().is_none() { sa } else { sb };
                    derive_latency(sa, sb, speed).ok_or_else(|| {
                        TopologyError::MissingCoordinates {
                            location,
                            id: missing.id.clone(),
                        }
                    })?
                }
            };
            links.push(Link {
                a: link.a,
                b: link.b,
                capacity_mbps: link.capacity_mbps,
                latency_ms,
            });
        }

        if !record.sites.iter().any(|s| s.gateway) {
            return Err(TopologyError::NoGateway);
        }

        let mut adjacency = vec![Vec::new(); record.sites.len()];
        for (li, link) in links.iter().enumerate() {
            let (a, b) = (index[&link.a], index[&link.b]);
            adjacency[a].push((b, li));
            adjacency[b].push((a, li));
        }
        for row in &mut adjacency {
            row.sort_unstable();
        }

        Ok(Topology {
            name: record.name,
            propagation_speed: speed,
            sites: record.sites,
            links,
            index,
            adjacency,
        })
    }

    /// Serializes to the file format. Every link carries an explicit
    /// `latency_ms`, so reloading reproduces the same topology.
    pub fn to_json(&self) -> String {
        let out = TopologyOut {
            name: &self.name,
            propagation_speed_m_per_s: self.propagation_speed,
            sites: &self.sites,
            links: &self.links,
        };
        serde_json::to_string_pretty(&out).expect("topology serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn propagation_speed(&self) -> f64 {
        self.propagation_speed
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn site_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn site_id(&self, i: usize) -> &str {
        &self.sites[i].id
    }

    pub fn is_gateway(&self, i: usize) -> bool {
        self.sites[i].gateway
    }

    /// Neighbor indices of site `i`, ascending.
    pub fn neighbor_indices(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[i].iter().map(|&(n, _)| n)
    }

    /// `(neighbor, link index)` pairs of site `i`, ascending by neighbor.
    pub fn incident(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn link_index(&self, i: usize, j: usize) -> Option<usize> {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(n, _)| n)
            .ok()
            .map(|p| self.adjacency[i][p].1)
    }

    pub fn link_endpoints(&self, li: usize) -> (usize, usize) {
        let link = &self.links[li];
        (self.index[&link.a], self.index[&link.b])
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.link_index(i, j).is_some()
    }

    /// W_ij: per-direction capacity, zero when the sites are not linked.
    pub fn capacity(&self, i: usize, j: usize) -> f64 {
        self.link_index(i, j)
            .map_or(0.0, |li| self.links[li].capacity_mbps)
    }

    /// Δ_ij, defined only for linked sites.
    pub fn latency(&self, i: usize, j: usize) -> Option<f64> {
        self.link_index(i, j).map(|li| self.links[li].latency_ms)
    }

    /// All ordered pairs `(i, j)` of linked sites, sorted.
    pub fn directed_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<_> = (0..self.len())
            .flat_map(|i| self.neighbor_indices(i).map(move |j| (i, j)))
            .collect();
        pairs.sort_unstable();
        pairs
    }

    /// Ids of the sites sharing a link with `site`.
    pub fn neighbors(&self, site: &str) -> Result<BTreeSet<String>, TopologyError> {
        let i = self
            .site_index(site)
            .ok_or_else(|| TopologyError::UnknownSite(site.to_string()))?;
        Ok(self
            .neighbor_indices(i)
            .map(|n| self.sites[n].id.clone())
            .collect())
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({} sites, {} links)",
            self.name,
            self.sites.len(),
            self.links.len()
        )
    }
}
