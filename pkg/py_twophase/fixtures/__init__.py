"""
Bundled cell library, sample Verilog designs and netlist generators.
"""
