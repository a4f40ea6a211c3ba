//! DOT rendering of systems and witnesses.
//!
//! Output is deterministic: nodes and edges are emitted in index order, and
//! witness mode groups each class into a cluster with one rank per level and
//! a box around every atom.

use std::fmt::Write as _;

use crate::system::SelfmapSystem;
use crate::witness::TopologyWitness;

/// Renders the functional graph: one node per point, one edge `x -> Tx`.
pub fn export_system_dot(system: &SelfmapSystem) -> String {
    let mut out = String::from("digraph system {\n  rankdir=BT;\n");
    for x in system.points() {
        let _ = writeln!(out, "  p{x} [label=\"{x}\"];");
    }
    for x in system.points() {
        let _ = writeln!(out, "  p{x} -> p{};", system.apply(x));
    }
    out.push_str("}\n");
    out
}

/// Renders a witness: the star at the bottom, one cluster per class or
/// branch, levels ranked, atoms boxed, and the map edges between levels.
pub fn export_witness_dot(witness: &TopologyWitness) -> String {
    let mut out = String::from("digraph witness {\n  rankdir=BT;\n  compound=true;\n");
    match witness.star {
        Some(star) => {
            let _ = writeln!(out, "  p{star} [label=\"{star} (star)\", shape=doublecircle];");
        }
        None => {
            out.push_str("  star [label=\"star\", shape=doublecircle];\n");
        }
    }

    let chains = witness
        .class_witnesses
        .iter()
        .map(|r| (format!("class{}", r.class_id), format!("class {}", r.class_id), &r.chain, &r.witness))
        .chain(witness.branch_witnesses.iter().map(|r| {
            (
                format!("branch{}", r.ray_index),
                format!("branch {}", r.ray_index),
                &r.chain,
                &r.witness,
            )
        }));

    for (id, label, chain, chain_witness) in chains {
        let _ = writeln!(out, "  subgraph cluster_{id} {{");
        let _ = writeln!(out, "    label=\"{label}\";");
        for (level, orders) in chain_witness.orders.iter().enumerate() {
            let _ = writeln!(out, "    subgraph cluster_{id}_l{level} {{");
            let _ = writeln!(out, "      label=\"level {level}\";");
            for (atom, order) in orders.iter().enumerate() {
                let _ = writeln!(out, "      subgraph cluster_{id}_l{level}_a{atom} {{");
                out.push_str("        label=\"\"; style=solid;\n        ");
                out.push_str("rank=same; ");
                for &point in order.sequence() {
                    let _ = write!(out, "p{point}; ");
                }
                out.push('\n');
                for &point in order.sequence() {
                    let _ = writeln!(out, "        p{point} [label=\"{point}\"];");
                }
                out.push_str("      }\n");
            }
            out.push_str("    }\n");
        }
        for map in chain.map_tables() {
            for (&x, &y) in map {
                let _ = writeln!(out, "    p{x} -> p{y};");
            }
        }
        out.push_str("  }\n");
        // bottom level maps onto the star (or the ray continues)
        if let Some(star) = witness.star {
            for order in &chain_witness.orders[0] {
                for &point in order.sequence() {
                    let _ = writeln!(out, "  p{point} -> p{star};");
                }
            }
        }
    }
    if witness.star.is_none() {
        // ray nodes march toward the star through the tail
        let mut ray_nodes: Vec<usize> = witness
            .branch_witnesses
            .iter()
            .map(|r| r.ray_index)
            .collect();
        ray_nodes.sort_unstable();
        for window in ray_nodes.windows(2) {
            let _ = writeln!(out, "  p{} -> p{};", window[0], window[1]);
        }
        if let Some(&last) = ray_nodes.last() {
            let _ = writeln!(out, "  p{last} -> star [style=dashed, label=\"tail\"];");
        } else {
            out.push_str("  tail [label=\"bare tail\", shape=plaintext];\n  tail -> star [style=dashed];\n");
        }
    }
    out.push_str("}\n");
    out
}
