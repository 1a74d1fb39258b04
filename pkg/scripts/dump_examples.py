"""Write grammars, images and classification reports for the bundled examples."""

import argparse
from pathlib import Path

from ratrw.automata import format_automaton, parse_automaton
from ratrw.checks import data_text, load_data_trs
from ratrw.classifier import classify
from ratrw.grammars import format_grammar
from ratrw.suffix import build_suffix_grammar, image_automaton_suffix, saturate, to_state_system
from ratrw.topdown import build_bottomup, build_grammar, image_automaton


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out")
    out = Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)

    fg = load_data_trs("topdown_fg.trs")
    swap = load_data_trs("swap_pump.trs")
    for name in ("topdown_fg.trs", "topdown_fg_inverse.trs", "swap_pump.trs", "nested_g.trs"):
        (out / f"{name}.classes").write_text(classify(load_data_trs(name)).format())
    (out / "topdown_fg.grammar").write_text(format_grammar(build_grammar(fg)))
    (out / "topdown_fg_inverse.grammar").write_text(format_grammar(build_bottomup(fg.inverse())))
    (out / "fgga_image.aut").write_text(format_automaton(image_automaton(fg, parse_automaton(data_text("fgga.aut")))))
    (out / "swap_pump.saturation.trs").write_text(saturate(to_state_system(swap)).format())
    (out / "swap_pump.grammar").write_text(format_grammar(build_suffix_grammar(swap)))
    faa = parse_automaton(data_text("faa.aut"))
    for side in ("forward", "inverse"):
        (out / f"faa_{side}.aut").write_text(format_automaton(image_automaton_suffix(swap, faa, side)))
    for p in sorted(out.iterdir()):
        print(f"{p}  {p.stat().st_size} bytes")


if __name__ == "__main__":
    main()
