"""Vertex deletion against topological-minor patterns on planar graphs.

The package is organized bottom-up:

  graphs         immutable graphs, embeddings, combinatorial disks
  tm             topological-minor models, folios, the deletion oracle
  decomposition  tree decompositions, brambles, walls and layers
  annulus        railed annuli: extraction from walls, capacity, geometry
  linkage        linkage taming: streams and rivers, rerouting, confinement
  solver         parameter derivation and the irrelevant-vertex pipeline
  io / cli       file formats, traces, and the command-line front end
"""

__version__ = "0.1.0"
