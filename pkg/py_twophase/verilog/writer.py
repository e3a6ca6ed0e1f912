"""
Structural Verilog writer.

Output order matches the canonical format: ports as declared, wires and
instances sorted by name. Names that are not plain identifiers are written as
escaped identifiers.
"""
import re

from .lexer import KEYWORDS

_PLAIN = re.compile(r"^[A-Za-z_][A-Za-z0-9_$]*$")


def verilog_name(name):
    if _PLAIN.match(name) and name not in KEYWORDS:
        return name
    return f"\\{name} "


def _net(netlist, net):
    if net == netlist.const_zero:
        return "1'b0"
    if net == netlist.const_one:
        return "1'b1"
    return verilog_name(net)


def emit_verilog(netlist):
    """Render a netlist as structural Verilog that ``parse_verilog`` reads back."""
    lines = []
    header = ", ".join(verilog_name(p.name) for p in netlist.ports)
    lines.append(f"module {verilog_name(netlist.name)}({header});")
    for p in netlist.ports:
        attr = "(* clock *) " if p.is_clock else ""
        direction = "input" if p.is_input else "output"
        lines.append(f"  {attr}{direction} {verilog_name(p.name)};")

    port_names = {p.name for p in netlist.ports}
    for net in sorted(netlist.nets):
        if net not in port_names and not netlist.is_constant(net):
            lines.append(f"  wire {verilog_name(net)};")

    for inst in sorted(netlist.instances, key=lambda i: i.name):
        if inst.init:
            lines.append(f"  (* init = 1'b{inst.init} *)")
        conns = ", ".join(f".{pin}({_net(netlist, net)})" for pin, net in sorted(inst.pins.items()))
        lines.append(f"  {verilog_name(inst.kind)} {verilog_name(inst.name)} ({conns});")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"
