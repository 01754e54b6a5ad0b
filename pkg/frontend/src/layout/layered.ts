import type { ChainDoc, ClustersPayload } from "../types";

export interface FlowNode {
  id: string;
  /** cluster members, or the single address for a singleton */
  addresses: string[];
  /** attribution-tag entity ids touching the node */
  entities: string[];
  /** txids whose co-spends merged this cluster (tooltip provenance) */
  mergeTxids: string[];
  layer: number;
  row: number;
}

export interface FlowEdge {
  from: string;
  to: string;
  txid: string;
  valueSat: number;
  coinjoin: boolean;
}

export interface FlowGraph {
  nodes: FlowNode[];
  edges: FlowEdge[];
  layerCount: number;
}

/**
 * Left-to-right layered layout of value flow between clusters.
 *
 * Layers follow transaction order: a cluster sits one layer right of the
 * deepest cluster that pays into it. Cluster membership, merge provenance,
 * and entity tags all come from the clusters payload; the chain document
 * (itself a service response) only contributes the edges.
 */
export function buildFlowGraph(chain: ChainDoc, clusters: ClustersPayload): FlowGraph {
  const clusterOf = new Map<string, string>();
  const nodes = new Map<string, FlowNode>();

  const mergesByAddress = new Map<string, Set<string>>();
  for (const merge of clusters.merges) {
    for (const address of [merge.address_a, merge.address_b]) {
      let set = mergesByAddress.get(address);
      if (!set) {
        set = new Set();
        mergesByAddress.set(address, set);
      }
      set.add(merge.txid);
    }
  }

  for (const cluster of clusters.clusters) {
    const id = `cluster:${cluster.addresses[0] ?? ""}`;
    const mergeTxids = new Set<string>();
    for (const address of cluster.addresses) {
      clusterOf.set(address, id);
      for (const txid of mergesByAddress.get(address) ?? []) mergeTxids.add(txid);
    }
    nodes.set(id, {
      id,
      addresses: [...cluster.addresses],
      entities: [...cluster.entities],
      mergeTxids: [...mergeTxids].sort(),
      layer: 0,
      row: 0,
    });
  }

  const coinjoinTxids = new Set(clusters.coinjoin_flagged.map((c) => c.txid));
  const outputOwner = new Map<string, string>(); // "txid:vout" -> node id
  const edgeAccumulator = new Map<string, FlowEdge>();

  for (const tx of chain.transactions) {
    const sources = new Set<string>();
    for (const input of tx.inputs) {
      const owner = outputOwner.get(`${input.txid}:${input.vout}`);
      if (owner !== undefined) sources.add(owner);
    }
    for (let vout = 0; vout < tx.outputs.length; vout++) {
      const output = tx.outputs[vout]!;
      const target = clusterOf.get(output.address) ?? `cluster:${output.address}`;
      if (!nodes.has(target)) {
        nodes.set(target, {
          id: target,
          addresses: [output.address],
          entities: [],
          mergeTxids: [],
          layer: 0,
          row: 0,
        });
      }
      outputOwner.set(`${tx.txid}:${vout}`, target);
      for (const source of sources) {
        if (source === target) continue;
        const key = `${source}->${target}:${tx.txid}`;
        const existing = edgeAccumulator.get(key);
        if (existing) {
          existing.valueSat += output.value_sat;
        } else {
          edgeAccumulator.set(key, {
            from: source,
            to: target,
            txid: tx.txid,
            valueSat: output.value_sat,
            coinjoin: coinjoinTxids.has(tx.txid),
          });
        }
      }
    }
  }

  const edges = [...edgeAccumulator.values()];

  // longest-path layering; bounded rounds because clustering can make the
  // cluster-level flow graph cyclic even though the chain itself is not
  let changed = true;
  for (let round = 0; changed && round <= nodes.size; round++) {
    changed = false;
    for (const edge of edges) {
      const source = nodes.get(edge.from)!;
      const target = nodes.get(edge.to)!;
      if (target.layer < source.layer + 1 && source.layer + 1 <= nodes.size) {
        target.layer = source.layer + 1;
        changed = true;
      }
    }
  }

  const byLayer = new Map<number, FlowNode[]>();
  for (const node of nodes.values()) {
    const bucket = byLayer.get(node.layer) ?? [];
    bucket.push(node);
    byLayer.set(node.layer, bucket);
  }
  for (const bucket of byLayer.values()) {
    bucket.sort((a, b) => (a.id < b.id ? -1 : a.id > b.id ? 1 : 0));
    bucket.forEach((node, row) => {
      node.row = row;
    });
  }

  const ordered = [...nodes.values()].sort(
    (a, b) => a.layer - b.layer || a.row - b.row,
  );
  const layerCount = ordered.length === 0
    ? 0
    : Math.max(...ordered.map((n) => n.layer)) + 1;
  return { nodes: ordered, edges, layerCount };
}
