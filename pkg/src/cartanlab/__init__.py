"""Numerical laboratory for kernel positivity, matrix-ball group actions,
and boundary traces of holomorphic function spaces.

Submodules (import what you need; nothing heavy is loaded from here):

* ``linalg``: complex matrices, Hermitian eigensolver, determinant powers,
  log-gamma, matrix exponential.
* ``fourier``: one- and two-variable Fourier series, weighted Sobolev-type
  norms, grid transforms.
* ``sl2``: the disc-model group action on weighted series, restriction
  norms, intertwining and J-operator residuals.
* ``kernels``: reproducing kernels on matrix-ball domains, Gram positivity
  scans, indefiniteness witnesses.
* ``groups``: matrix-ball group realizations, fractional maps, cocycles,
  boundary orbits.
* ``berezin``: disc quadrature and the normalized pairing limit.
* ``trace``: radial boundary traces on the torus and sphere, convergence
  diagnostics, boundary kernel integrability.
* ``selftest``: the frozen end-to-end verification suite.
* ``reports``, ``figures``, ``cli``: experiment runner with JSON-lines,
  CSV, metadata, and PNG outputs.
"""
