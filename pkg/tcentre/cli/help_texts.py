"""
Command Help Texts
==================
Centralized help strings for the command-line front end.
"""

# ==================== GROUP ====================

GROUP_HELP = """\
T centre spin toolkit.

Predict ground-state spectra, fit the hydrogen hyperfine tensor, and quantify nuclear
memory decoherence over optical cycles. Physical values always carry units
(T, mT, ns, MHz); only a zero field may be written as a bare 0.
"""

OPTION_HELP = {
    'g_e': "Electron g-factor (overrides TCENTRE_G_E).",
    'g_n': "Hydrogen nuclear g-factor (overrides TCENTRE_G_N).",
    'log_level': "Logging level for messages on stderr.",
    'tensor': "Built-in name (paper, measured, dft, zero), inline 'AX,AY,AZ@alpha,beta,gamma' in MHz/deg, or a YAML/JSON file.",
    'field': "Field spec '<mag>[@dir]' or '<start>:<stop>:<steps>[@dir]'; dir is 001, 110, 111 or 'x,y,z'.",
    'out': "Output '<stem>.csv'; a '<stem>.json' provenance envelope is written alongside.",
    'tau': "Excited-state lifetime, e.g. 10ns.",
    't': "Total evolution time, e.g. 100ns (at least 10·tau unless --allow-short-time).",
    'seed': "Random seed for noise.",
}

# ==================== COMMANDS ====================

COMMAND_HELP = {
    'predict': """\
Predict ground-state transition lines.

Lines for every defect orientation (or --orientation) at each field of the spec.
Zero field gives the closed-form hyperfine spectrum.
""",

    'fit': """\
Fit the hyperfine tensor to a resonance CSV.

Columns: Bx_T, By_T, Bz_T, freq_MHz, sigma_MHz, optional subset and pair ('i-j').
Lines starting with '#' are comments. The frame (alpha, beta) is fixed by default and only
the principal values and gamma are fitted.
""",

    'map': """\
Evaluate a decoherence metric over field directions.

Metrics:
- cyclicity: 1/P_flip after one optical cycle (inf on the hyperfine axes)
- delta_h: ground splitting minus bare Larmor splitting (MHz)
- delta_e: electron-dependent splitting difference (MHz)
- corrected_fidelity: fidelity after the average-unitary correction

Output CSV columns: theta_deg, phi_deg, value.
""",

    'dpm': """\
Trace the dephasing protection manifold (delta_h = 0).

Writes the contour polyline (theta_deg, phi_deg) and reports the largest
electron-dependent splitting along it.
""",

    'synth': """\
Generate a synthetic resonance dataset.

The output is directly readable by 'fit'. With --noise 0 a --sigma must be given.
""",

    'orientations': """\
Export the 12 defect orientations as JSON.
""",
}

# ==================== EXIT CODES ====================

EXIT_CODE_HELP = """\
Exit codes: 0 success, 2 usage, 3 input parse, 4 numerical or regime, 5 underdetermined fit.
"""
