use crate::graph::{builders, MetricGraph};

pub struct CorpusEntry {
    pub name: &'static str,
    pub graph: MetricGraph,
    pub note: &'static str,
}

/// The named graphs of the theory, all with the lengths used by the builtin
/// experiments.
pub fn corpus() -> Vec<CorpusEntry> {
    vec![
        CorpusEntry { name: "line", graph: builders::line(), note: "two half-lines at one vertex; the soliton is a ground state" },
        CorpusEntry {
            name: "tadpole",
            graph: builders::tadpole(2.0),
            note: "line with the points -1 and 1 glued: loop of length 2 at the junction; ground state is the wrapped soliton",
        },
        CorpusEntry {
            name: "bubble_tower",
            graph: builders::bubble_tower(&[1.0, 2.0]),
            note: "line with the pairs +-1 and +-2 glued: loop of length 2 under two parallel unit edges; ground state is the wrapped soliton",
        },
        CorpusEntry {
            name: "bubble_tower_3",
            graph: builders::bubble_tower(&[0.5, 1.5, 3.0]),
            note: "three glued pairs +-0.5, +-1.5, +-3; ground state is the wrapped soliton",
        },
        CorpusEntry {
            name: "double_bridge",
            graph: builders::double_bridge(1.0, 1.0),
            note: "two half-lines joined by two parallel unit edges; satisfies (H), so the infimum is the soliton level and is not attained",
        },
        CorpusEntry {
            name: "pendant",
            graph: builders::pendant(1.0),
            note: "line with a unit pendant at the junction; violates (H) and has a ground state below the soliton level",
        },
        CorpusEntry {
            name: "fig2",
            graph: builders::fig2(),
            note: "five half-lines, thirteen unit bounded edges, one self-loop; satisfies (H)",
        },
    ]
}
