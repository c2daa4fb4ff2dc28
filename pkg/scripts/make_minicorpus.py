"""Regenerate the bundled mini-corpus under src/bioee/data/minicorpus/.

Each document targets a specific behavior of the pipeline (named by it),
so tests can reason about exact expected outputs.  Run from the repo root:

    python3 scripts/make_minicorpus.py
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from bioee.builder import DocumentBuilder

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "bioee" / "data" / "minicorpus"


def promo_basic():
    b = DocumentBuilder("promo_basic", "CTLA-4 promotes FOXP3 expression in regulatory T cells.\n")
    ctla = b.entity("CTLA-4")
    foxp3 = b.entity("FOXP3")
    t_exp = b.trigger("expression", "Gene_expression")
    t_pro = b.trigger("promotes", "Positive_regulation")
    e1 = b.event("Gene_expression", t_exp, themes=[foxp3])
    b.event("Positive_regulation", t_pro, themes=[e1], causes=[ctla])
    return b


def coord_shared_partner():
    # two gold pairs share a partner; exhaustive pairing over the three
    # themes would also emit the spurious {Sp1, Sp3} pair
    b = DocumentBuilder(
        "coord_shared_partner", "Sp1 and Sp3 bind the APOBEC3G promoter region.\n"
    )
    sp1 = b.entity("Sp1")
    sp3 = b.entity("Sp3")
    a3g = b.entity("APOBEC3G")
    t = b.trigger("bind", "Binding")
    b.event("Binding", t, themes=[sp1, a3g])
    b.event("Binding", t, themes=[sp3, a3g])
    return b


def coord_two_events():
    b = DocumentBuilder("coord_two_events", "BOB.1 interacts with Oct1 and Oct2 in B cells.\n")
    bob = b.entity("BOB.1")
    oct1 = b.entity("Oct1")
    oct2 = b.entity("Oct2")
    t = b.trigger("interacts", "Binding")
    b.event("Binding", t, themes=[bob, oct1])
    b.event("Binding", t, themes=[bob, oct2])
    return b


def family_singletons():
    # three singleton events on one trigger; pairing them up scores zero
    b = DocumentBuilder(
        "family_singletons", "NFKB1, RELA and REL exhibit DNA-binding activity in vitro.\n"
    )
    nfkb1 = b.entity("NFKB1")
    rela = b.entity("RELA")
    rel = b.entity("REL", nth=1)  # first "REL" is inside RELA
    t = b.trigger("binding", "Binding")
    b.event("Binding", t, themes=[nfkb1])
    b.event("Binding", t, themes=[rela])
    b.event("Binding", t, themes=[rel])
    return b


def binding_pair():
    b = DocumentBuilder("binding_pair", "We studied the binding of TRAF1 to TNFR2.\n")
    traf1 = b.entity("TRAF1")
    tnfr2 = b.entity("TNFR2")
    t = b.trigger("binding", "Binding")
    b.event("Binding", t, themes=[traf1, tnfr2])
    return b


def single_theme_bind():
    b = DocumentBuilder("single_theme_bind", "Strong NF-kB binding was detected in nuclear extracts.\n")
    nfkb = b.entity("NF-kB")
    t = b.trigger("binding", "Binding")
    b.event("Binding", t, themes=[nfkb])
    return b


def nere_over_bind():
    b = DocumentBuilder("nere_over_bind", "FADD inhibited the interaction of TRAF2 with TNFR1.\n")
    fadd = b.entity("FADD")
    traf2 = b.entity("TRAF2")
    tnfr1 = b.entity("TNFR1")
    t_int = b.trigger("interaction", "Binding")
    t_inh = b.trigger("inhibited", "Negative_regulation")
    e1 = b.event("Binding", t_int, themes=[traf2, tnfr1])
    b.event("Negative_regulation", t_inh, themes=[e1], causes=[fadd])
    return b


def pore_shared_bind():
    # one binding event serves as Theme of two regulations with distinct
    # event-valued causes; per-trigger cross product reproduces this
    b = DocumentBuilder(
        "pore_shared_bind",
        "TNF expression and IL-4 expression promote the association of p50 with p65.\n",
    )
    tnf = b.entity("TNF")
    il4 = b.entity("IL-4")
    p50 = b.entity("p50")
    p65 = b.entity("p65")
    t_exp1 = b.trigger("expression", "Gene_expression", nth=0)
    t_exp2 = b.trigger("expression", "Gene_expression", nth=1)
    t_pro = b.trigger("promote", "Positive_regulation")
    t_ass = b.trigger("association", "Binding")
    e1 = b.event("Gene_expression", t_exp1, themes=[tnf])
    e2 = b.event("Gene_expression", t_exp2, themes=[il4])
    e3 = b.event("Binding", t_ass, themes=[p50, p65])
    b.event("Positive_regulation", t_pro, themes=[e3], causes=[e1])
    b.event("Positive_regulation", t_pro, themes=[e3], causes=[e2])
    return b


def simple_gexp():
    b = DocumentBuilder("simple_gexp", "Human monocytes express CD14 at high levels.\n")
    cd14 = b.entity("CD14")
    t = b.trigger("express", "Gene_expression")
    b.event("Gene_expression", t, themes=[cd14])
    return b


def simple_trans():
    b = DocumentBuilder("simple_trans", "Transcription of c-fos was induced by EGF treatment.\n")
    cfos = b.entity("c-fos")
    egf = b.entity("EGF")
    t_tr = b.trigger("Transcription", "Transcription")
    t_in = b.trigger("induced", "Positive_regulation")
    e1 = b.event("Transcription", t_tr, themes=[cfos])
    b.event("Positive_regulation", t_in, themes=[e1], causes=[egf])
    return b


def simple_prca():
    b = DocumentBuilder(
        "simple_prca", "Proteolytic degradation of IkB-alpha follows receptor engagement.\n"
    )
    ikb = b.entity("IkB-alpha")
    t = b.trigger("degradation", "Protein_catabolism")
    b.event("Protein_catabolism", t, themes=[ikb])
    return b


def simple_phos():
    b = DocumentBuilder("simple_phos", "Activated JAK2 mediates phosphorylation of STAT3.\n")
    jak2 = b.entity("JAK2")
    stat3 = b.entity("STAT3")
    t_ph = b.trigger("phosphorylation", "Phosphorylation")
    t_md = b.trigger("mediates", "Positive_regulation")
    e1 = b.event("Phosphorylation", t_ph, themes=[stat3])
    b.event("Positive_regulation", t_md, themes=[e1], causes=[jak2])
    return b


def simple_loca():
    b = DocumentBuilder("simple_loca", "SMAD4 translocates to the nucleus upon stimulation.\n")
    smad4 = b.entity("SMAD4")
    t = b.trigger("translocates", "Localization")
    b.event("Localization", t, themes=[smad4])
    return b


def mod_generic():
    b = DocumentBuilder("mod_generic", "HDAC1 undergoes covalent modification during mitosis.\n")
    hdac1 = b.entity("HDAC1")
    t = b.trigger("modification", "Protein_modification")
    b.event("Protein_modification", t, themes=[hdac1])
    return b


def mod_ubiq_cause():
    b = DocumentBuilder("mod_ubiq_cause", "TRAF6 mediates ubiquitination of NEMO in this pathway.\n")
    traf6 = b.entity("TRAF6")
    nemo = b.entity("NEMO")
    t = b.trigger("ubiquitination", "Ubiquitination")
    b.event("Ubiquitination", t, themes=[nemo], causes=[traf6])
    return b


def mod_acet():
    b = DocumentBuilder("mod_acet", "Acetylation of H3 occurs at active promoters.\n")
    h3 = b.entity("H3")
    t = b.trigger("Acetylation", "Acetylation")
    b.event("Acetylation", t, themes=[h3])
    return b


def mod_deac_event_cause():
    b = DocumentBuilder("mod_deac_event_cause", "SIRT1 expression promotes deacetylation of p53.\n")
    sirt1 = b.entity("SIRT1")
    p53 = b.entity("p53")
    t_exp = b.trigger("expression", "Gene_expression")
    t_de = b.trigger("deacetylation", "Deacetylation")
    e1 = b.event("Gene_expression", t_exp, themes=[sirt1])
    b.event("Deacetylation", t_de, themes=[p53], causes=[e1])
    return b


def regu_entity_theme():
    # multi-token entity: masking must collapse it to a single token
    b = DocumentBuilder("regu_entity_theme", "IL-10 regulates MHC class II on monocytes.\n")
    il10 = b.entity("IL-10")
    mhc = b.entity("MHC class II")
    t = b.trigger("regulates", "Regulation")
    b.event("Regulation", t, themes=[mhc], causes=[il10])
    return b


def multi_sentence():
    b = DocumentBuilder(
        "multi_sentence",
        "TRADD was phosphorylated within minutes. Expression of FasL increased thereafter. "
        "IL-6 localized to the membrane fraction.\n",
    )
    tradd = b.entity("TRADD")
    fasl = b.entity("FasL")
    il6 = b.entity("IL-6")
    t_ph = b.trigger("phosphorylated", "Phosphorylation")
    t_ex = b.trigger("Expression", "Gene_expression")
    t_in = b.trigger("increased", "Positive_regulation")
    t_lo = b.trigger("localized", "Localization")
    b.event("Phosphorylation", t_ph, themes=[tradd])
    e2 = b.event("Gene_expression", t_ex, themes=[fasl])
    b.event("Positive_regulation", t_in, themes=[e2])
    b.event("Localization", t_lo, themes=[il6])
    return b


def entities_only():
    b = DocumentBuilder("entities_only", "TP53 and MDM2 are well studied tumor associated proteins.\n")
    b.entity("TP53")
    b.entity("MDM2")
    return b


def dup_events():
    # E1/E2 are verbatim duplicates; after they merge, E4/E5 become
    # duplicates too, so deduplication must iterate to a fixed point
    b = DocumentBuilder("dup_events", "IKK phosphorylates IkB, which promotes NF-kB expression.\n")
    ikb = b.entity("IkB")
    nfkb = b.entity("NF-kB")
    t_ph = b.trigger("phosphorylates", "Phosphorylation")
    t_pr = b.trigger("promotes", "Positive_regulation")
    t_ex = b.trigger("expression", "Gene_expression")
    e1 = b.event("Phosphorylation", t_ph, themes=[ikb])
    e2 = b.event("Phosphorylation", t_ph, themes=[ikb])
    e3 = b.event("Gene_expression", t_ex, themes=[nfkb])
    b.event("Positive_regulation", t_pr, themes=[e3], causes=[e1])
    b.event("Positive_regulation", t_pr, themes=[e3], causes=[e2])
    return b


def adjacent_theme2():
    b = DocumentBuilder("adjacent_theme2", "We detected p50-p65 heterodimers in the nucleus.\n")
    p50 = b.entity("p50")
    p65 = b.entity("p65")
    t = b.trigger("heterodimers", "Binding")
    b.event("Binding", t, themes=[p50, p65])
    return b


def site_argument():
    # the Site role and its filler line are corpus content the pipeline
    # deliberately ignores; lenient parsing must keep the event
    b = DocumentBuilder("site_argument", "NIK phosphorylates IKKbeta at Ser176 in vivo.\n")
    b.entity("NIK")
    ikkb = b.entity("IKKbeta")
    t = b.trigger("phosphorylates", "Phosphorylation")
    b.event("Phosphorylation", t, themes=[ikkb])
    return b


def site_argument_write(out_dir):
    # builder cannot express ignored roles, so append them to the emitted a2
    b = site_argument()
    doc = b.write(out_dir)
    a2_path = pathlib.Path(out_dir) / "site_argument.a2"
    text = doc.text
    start = text.index("Ser176")
    lines = a2_path.read_text().splitlines()
    assert lines[-1].startswith("E1")
    lines.insert(-1, f"T4\tEntity {start} {start + 6}\tSer176")
    lines[-1] = lines[-1] + " Site:T4"
    a2_path.write_text("".join(line + "\n" for line in lines))


def regu_event_cause():
    b = DocumentBuilder(
        "regu_event_cause", "STAT6 expression blocked the degradation of IkB-alpha.\n"
    )
    stat6 = b.entity("STAT6")
    ikb = b.entity("IkB-alpha")
    t_ex = b.trigger("expression", "Gene_expression")
    t_bl = b.trigger("blocked", "Negative_regulation")
    t_de = b.trigger("degradation", "Protein_catabolism")
    e1 = b.event("Gene_expression", t_ex, themes=[stat6])
    e2 = b.event("Protein_catabolism", t_de, themes=[ikb])
    b.event("Negative_regulation", t_bl, themes=[e2], causes=[e1])
    return b


def ternary_complex():
    # a single three-theme event; pairing cannot represent it at all
    b = DocumentBuilder("ternary_complex", "TRAF2, TRADD and FADD form a ternary complex.\n")
    traf2 = b.entity("TRAF2")
    tradd = b.entity("TRADD")
    fadd = b.entity("FADD")
    t = b.trigger("complex", "Binding")
    b.event("Binding", t, themes=[traf2, tradd, fadd])
    return b


BUILDERS = [
    promo_basic,
    coord_shared_partner,
    coord_two_events,
    family_singletons,
    binding_pair,
    single_theme_bind,
    nere_over_bind,
    pore_shared_bind,
    simple_gexp,
    simple_trans,
    simple_prca,
    simple_phos,
    simple_loca,
    mod_generic,
    mod_ubiq_cause,
    mod_acet,
    mod_deac_event_cause,
    regu_entity_theme,
    multi_sentence,
    entities_only,
    dup_events,
    adjacent_theme2,
    regu_event_cause,
    ternary_complex,
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.iterdir():
        old.unlink()
    for make in BUILDERS:
        make().write(OUT)
    site_argument_write(OUT)
    n = len(list(OUT.glob("*.txt")))
    print(f"wrote {n} documents to {OUT}")


if __name__ == "__main__":
    main()
