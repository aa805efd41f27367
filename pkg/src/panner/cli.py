"""Command-line entry point exposing the pipeline stages."""

import json
import sys
from pathlib import Path

import click

from . import aliases as ad
from . import build as bld
from . import curation, server, synth, wiki
from .corpus import ClassInventory, read_conll_file, write_conll_file
from .tagger.model import TaggerModel, build_vocabulary
from .tagger.losses import STRATEGIES
from .tagger import strategy_head
from .train import (
    TrainConfig,
    baseline_annotate,
    evaluate,
    report_table,
    train,
)


def _echo_config(**kwargs):
    click.echo("config: " + json.dumps(kwargs, sort_keys=True))


def _inventory(new_classes, legacy_classes):
    new = [c for c in new_classes.split(",") if c]
    legacy = [c for c in legacy_classes.split(",") if c]
    return ClassInventory.from_names(new=new, legacy=legacy)


def _load_kept(path):
    with open(path, encoding="utf-8") as fh:
        return {line.strip() for line in fh if line.strip()}


class_options = [
    click.option("--new-classes", default="FOOD", show_default=True,
                 help="comma-separated new entity classes"),
    click.option("--legacy-classes", default="", show_default=True,
                 help="comma-separated legacy entity classes"),
]


def with_class_options(fn):
    for opt in reversed(class_options):
        fn = opt(fn)
    return fn


@click.group()
def main():
    """Build partially annotated NER corpora and train masked-loss taggers."""


@main.command()
@click.argument("dump", type=click.Path(exists=True))
@click.option("--articles", required=True, type=click.Path(),
              help="output article store (json lines)")
@click.option("--graph", required=True, type=click.Path(),
              help="output category graph (json)")
def ingest(dump, articles, graph):
    """Parse a dump file into articles and the category graph."""
    _echo_config(dump=dump, articles=articles, graph=graph)
    arts, g = wiki.load_dump(dump)
    with open(articles, "w", encoding="utf-8") as fh:
        for art in arts:
            fh.write(json.dumps({"id": art.id, "title": art.title,
                                 "text": art.text,
                                 "categories": art.categories}) + "\n")
    with open(graph, "w", encoding="utf-8") as fh:
        json.dump(g.to_jsonable(), fh)
    click.echo(f"ingested {len(arts)} articles, {len(g.nodes)} categories")


def _load_articles(path):
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                out.append(wiki.Article(rec["id"], rec["title"], rec["text"],
                                        rec["categories"]))
    return out


def _load_graph(path):
    with open(path, encoding="utf-8") as fh:
        return wiki.CategoryGraph.from_jsonable(json.load(fh))


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True))
@click.option("--start", required=True, help="start category")
@click.option("--class-name", required=True)
@click.option("--serve", "mode", flag_value="serve")
@click.option("--tty", "mode", flag_value="tty", default=True)
@click.option("--port", default=8765, show_default=True)
@click.option("--static", "static_dir", type=click.Path(), default=None,
              help="directory with the web UI assets (for --serve)")
@click.option("--log", "log_path", type=click.Path(), default=None,
              help="decision log to append to (enables resuming)")
@click.option("--resume-from", type=click.Path(), default=None,
              help="replay an existing decision log before starting")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write the exported article-id list here on completion")
def curate(graph_path, start, class_name, mode, port, static_dir, log_path,
           resume_from, out_path):
    """Interactive category curation (terminal or HTTP/web)."""
    _echo_config(graph=graph_path, start=start, class_name=class_name,
                 mode=mode, port=port, log=log_path, resume=resume_from,
                 out=out_path)
    graph = _load_graph(graph_path)
    if resume_from:
        cls, cat, log = curation.read_log(resume_from)
        session = curation.replay(graph, log, cls or class_name, cat or start)
    else:
        session = curation.CuratorSession(graph, start, class_name)
    log_fh = open(log_path, "a", encoding="utf-8") if log_path else None
    try:
        if mode == "serve":
            httpd = server.make_server(session, port=port,
                                       static_dir=static_dir, log_fh=log_fh)
            click.echo(f"serving curation session on port {httpd.server_address[1]}")
            try:
                httpd.serve_forever()
            except KeyboardInterrupt:
                pass
        else:
            curation.run_tty_session(session, sys.stdin, sys.stdout, log_fh)
    finally:
        if log_fh:
            log_fh.close()
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            for art_id in session.export_article_set():
                fh.write(art_id + "\n")
        click.echo(f"exported {len(session.kept_articles)} article ids")


@main.command("build-dict")
@click.option("--articles", "articles_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
def build_dict(articles_path, out):
    """Build the alias dictionary from article links and titles."""
    _echo_config(articles=articles_path, out=out)
    dictionary = ad.build_dictionary(_load_articles(articles_path))
    dictionary.save(out)
    click.echo(f"wrote {len(dictionary)} aliases")


@main.command("build-corpus")
@click.option("--articles", "articles_path", required=True,
              type=click.Path(exists=True))
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True))
@click.option("--kept", "kept_path", required=True, type=click.Path(exists=True))
@click.option("--class-name", default="FOOD", show_default=True)
@with_class_options
@click.option("--seed", default=7, show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--stats", "stats_path", type=click.Path(), default=None)
def build_corpus(articles_path, dict_path, kept_path, class_name, new_classes,
                 legacy_classes, seed, out, stats_path):
    """Assemble the partially annotated wiki corpus."""
    _echo_config(articles=articles_path, dict=dict_path, kept=kept_path,
                 class_name=class_name, seed=seed, out=out)
    inv = _inventory(new_classes, legacy_classes)
    config = bld.BuildConfig(inv, class_name, _load_kept(kept_path), seed=seed)
    dictionary = ad.AliasDictionary.load(dict_path)
    sentences, stats = bld.build_wiki_corpus(_load_articles(articles_path),
                                             dictionary, config)
    write_conll_file(sentences, out, inv)
    table = stats.to_table(class_name)
    if stats_path:
        with open(stats_path, "w", encoding="utf-8") as fh:
            fh.write(table)
    click.echo(table, nl=False)


@main.command("mask-legacy")
@click.argument("conll_in", type=click.Path(exists=True))
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True))
@click.option("--kept", "kept_path", required=True, type=click.Path(exists=True))
@click.option("--class-name", default="FOOD", show_default=True)
@with_class_options
@click.option("--gazetteer", type=click.Path(exists=True), default=None,
              help="CLASS<TAB>phrase list for the auxiliary tagger")
@click.option("--out", required=True, type=click.Path())
def mask_legacy(conll_in, dict_path, kept_path, class_name, new_classes,
                legacy_classes, gazetteer, out):
    """Mask likely new-class mentions inside a fully supervised corpus."""
    _echo_config(conll_in=conll_in, dict=dict_path, kept=kept_path,
                 gazetteer=gazetteer, out=out)
    inv = _inventory(new_classes, legacy_classes)
    config = bld.BuildConfig(inv, class_name, _load_kept(kept_path))
    sentences = read_conll_file(conll_in, inv)
    aux = bld.GazetteerTagger.load(gazetteer) if gazetteer else None
    masked = bld.mask_legacy_corpus(sentences, ad.AliasDictionary.load(dict_path),
                                    config, aux)
    write_conll_file(masked, out, inv)
    click.echo(f"masked corpus written to {out}")


@main.command("split-merge")
@click.option("--wiki", "wiki_path", required=True, type=click.Path(exists=True))
@click.option("--legacy-train", type=click.Path(exists=True), default=None)
@click.option("--legacy-dev", type=click.Path(exists=True), default=None)
@click.option("--legacy-test", type=click.Path(exists=True), default=None)
@with_class_options
@click.option("--ratios", default="0.8,0.1,0.1", show_default=True)
@click.option("--seed", default=7, show_default=True)
@click.option("--out-prefix", required=True)
def split_merge(wiki_path, legacy_train, legacy_dev, legacy_test, new_classes,
                legacy_classes, ratios, seed, out_prefix):
    """Split the wiki corpus and merge with legacy splits (seeded shuffles)."""
    _echo_config(wiki=wiki_path, ratios=ratios, seed=seed,
                 out_prefix=out_prefix)
    inv = _inventory(new_classes, legacy_classes)
    ratio_tuple = tuple(float(r) for r in ratios.split(","))
    config = bld.BuildConfig(inv, "", set(), seed=seed, ratios=ratio_tuple)
    wiki_sents = read_conll_file(wiki_path, inv)
    legacy = []
    for path in (legacy_train, legacy_dev, legacy_test):
        legacy.append(read_conll_file(path, inv) if path else [])
    splits = bld.split_and_merge(wiki_sents, legacy, config)
    for name, sents in zip(("train", "dev", "test"), splits):
        write_conll_file(sents, f"{out_prefix}.{name}.conll", inv)
        click.echo(f"{name}: {len(sents)} sentences")


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--n", "count", required=True, type=int)
@click.option("--seed", default=7, show_default=True)
@with_class_options
@click.option("--held", required=True, type=click.Path())
@click.option("--rest", required=True, type=click.Path())
def holdout(corpus, count, seed, new_classes, legacy_classes, held, rest):
    """Hold out a seeded sample for manual gold annotation."""
    _echo_config(corpus=corpus, n=count, seed=seed, held=held, rest=rest)
    inv = _inventory(new_classes, legacy_classes)
    sentences = read_conll_file(corpus, inv)
    held_out, remainder = bld.holdout_for_gold(sentences, count, seed, inv)
    write_conll_file(held_out, held, inv)
    write_conll_file(remainder, rest, inv)


@main.command("train")
@click.argument("train_path", type=click.Path(exists=True))
@click.argument("dev_path", type=click.Path(exists=True))
@click.option("--strategy", type=click.Choice(STRATEGIES), required=True)
@with_class_options
@click.option("--seed", default=7, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--lr", default=5e-5, show_default=True)
@click.option("--epochs", default=10, show_default=True)
@click.option("--dim", default=32, show_default=True)
@click.option("--window", default=2, show_default=True)
@click.option("--out", required=True, type=click.Path(),
              help="checkpoint output path")
@click.option("--log", "log_path", type=click.Path(), default=None)
def train_cmd(train_path, dev_path, strategy, new_classes, legacy_classes,
              seed, batch_size, lr, epochs, dim, window, out, log_path):
    """Train a tagger with one of the three loss strategies."""
    _echo_config(train=train_path, dev=dev_path, strategy=strategy, seed=seed,
                 batch_size=batch_size, lr=lr, epochs=epochs, dim=dim,
                 window=window, out=out)
    inv = _inventory(new_classes, legacy_classes)
    train_set = read_conll_file(train_path, inv)
    dev_set = read_conll_file(dev_path, inv)
    vocab = build_vocabulary(train_set)
    model = TaggerModel.init(inv, vocab, strategy_head(strategy), dim=dim,
                             radius=window, seed=seed)
    config = TrainConfig(strategy=strategy, batch_size=batch_size,
                         epochs=epochs, lr=lr, seed=seed)
    log_fh = open(log_path, "w", encoding="utf-8") if log_path else None
    try:
        model, log = train(train_set, dev_set, model, config, log_fh)
    finally:
        if log_fh:
            log_fh.close()
    model.save(out)
    best = max(log, key=lambda e: e["dev_f1"])
    click.echo(f"best dev F1 {best['dev_f1']:.4f} at epoch {best['epoch']}")


@main.command("eval")
@click.argument("checkpoint", type=click.Path(exists=True))
@click.argument("test_path", type=click.Path(exists=True))
@click.option("--name", default="model", show_default=True)
@click.option("--report", "report_path", type=click.Path(), default=None)
def eval_cmd(checkpoint, test_path, name, report_path):
    """Evaluate a checkpoint on a gold test file (span-level P/R/F1)."""
    _echo_config(checkpoint=checkpoint, test=test_path)
    model = TaggerModel.load(checkpoint)
    test_set = read_conll_file(test_path, model.inventory)
    report = evaluate(model, test_set)
    table = report_table({Path(test_path).name: {name: report}})
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(table)
    click.echo(table, nl=False)


@main.command()
@click.argument("gold_path", type=click.Path(exists=True))
@click.option("--dict", "dict_path", required=True, type=click.Path(exists=True))
@click.option("--kept", "kept_path", required=True, type=click.Path(exists=True))
@click.option("--class-name", default="FOOD", show_default=True)
@with_class_options
@click.option("--report", "report_path", type=click.Path(), default=None)
def baseline(gold_path, dict_path, kept_path, class_name, new_classes,
             legacy_classes, report_path):
    """Dictionary-annotation baseline on a gold test file."""
    _echo_config(gold=gold_path, dict=dict_path, kept=kept_path,
                 class_name=class_name)
    inv = _inventory(new_classes, legacy_classes)
    gold = read_conll_file(gold_path, inv)
    report = baseline_annotate(gold, ad.AliasDictionary.load(dict_path),
                               _load_kept(kept_path), class_name, inv)
    table = report_table({Path(gold_path).name: {"baseline": report}})
    if report_path:
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(table)
    click.echo(table, nl=False)


@main.command("synth-dump")
@click.option("--seed", default=7, show_default=True)
@click.option("--sentences", default=2000, show_default=True)
@click.option("--dump", "dump_path", required=True, type=click.Path())
@click.option("--gold", "gold_path", required=True, type=click.Path())
def synth_dump(seed, sentences, dump_path, gold_path):
    """Generate the bundled synthetic dump and its gold test set."""
    _echo_config(seed=seed, sentences=sentences, dump=dump_path,
                 gold=gold_path)
    cfg = synth.SynthConfig(seed=seed, sentences=sentences)
    with open(dump_path, "w", encoding="utf-8") as fh:
        fh.write(synth.generate_dump(cfg))
    inv = ClassInventory.from_names(new=[synth.CLASS_NAME])
    gold = synth.generate_gold(cfg, inv)
    write_conll_file(gold, gold_path, inv)
    click.echo(f"dump and {len(gold)} gold sentences written")


if __name__ == "__main__":
    main()
