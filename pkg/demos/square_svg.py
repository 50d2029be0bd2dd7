"""Decorate a 32x32 square torus, verify it, and write an SVG next to this file."""
from pathlib import Path

from schreier_lab import LabelField, build_archimedean
from schreier_lab import verify
from schreier_lab.decorators import schreier_square
from schreier_lab.render import render_svg

g = build_archimedean("square", 32, 32)
dec = schreier_square(g, LabelField(7))
print("valid Schreier:", verify.check_schreier(g, dec).passed, "retries:", dec.retries)

census = verify.monochrome_components(g, dec)
for colour in range(dec.d):
    print(f"colour {colour + 1}: cycle lengths {sorted(census.lengths_of(colour))}")

out = Path(__file__).with_name("square_32.svg")
out.write_text(render_svg(g, dec))
print("wrote", out)
