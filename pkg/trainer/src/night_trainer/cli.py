"""``night-train`` command line front end: train and export subcommands."""

from __future__ import annotations

import argparse
import sys

from night_trainer.export import export_predictions
from night_trainer.train import TrainConfig, load_checkpoint, train


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="night-train", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train on a dataset manifest")
    t.add_argument("--manifest", required=True, help="dataset manifest JSON")
    t.add_argument("--out", required=True, help="output directory for checkpoints and log")
    t.add_argument("--epochs", type=int, default=695)
    t.add_argument("--lr", type=float, default=1e-4)
    t.add_argument("--batch-size", type=int, default=8)
    t.add_argument("--patience", type=int, default=150)
    t.add_argument("--no-augment", action="store_true")
    t.add_argument("--seed", type=int, default=0)

    e = sub.add_parser("export", help="export predictions for a manifest")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--manifest", required=True)
    e.add_argument("--out", required=True)
    e.add_argument("--split", default=None)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "train":
            cfg = TrainConfig(
                max_epochs=args.epochs,
                learning_rate=args.lr,
                batch_size=args.batch_size,
                patience=args.patience,
                augment=not args.no_augment,
                seed=args.seed,
            )
            records = train(args.manifest, args.manifest, args.out, cfg)
            last = records[-1]
            print(
                f"trained {len(records)} epochs: "
                f"val loss {last['val_loss']:.4f}, val mIoU {last['val_miou']:.3f}"
            )
        else:
            model = load_checkpoint(args.checkpoint)
            written = export_predictions(model, args.manifest, args.out, split=args.split)
            print(f"wrote {len(written)} predictions to {args.out}")
        return 0
    except (OSError, ValueError) as exc:
        print(f"night-train: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
