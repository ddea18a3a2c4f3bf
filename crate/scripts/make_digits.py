"""Export the bundled 8x8 digits set as a binary task (label 1 iff digit >= 5).

One sample per line: 64 comma-separated pixel intensities (0..16), then the label.
"""
import sys

from sklearn.datasets import load_digits


def main(path):
    digits = load_digits()
    with open(path, "w") as out:
        for pixels, target in zip(digits.data, digits.target):
            fields = [str(int(p)) for p in pixels] + [str(int(target >= 5))]
            out.write(",".join(fields) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "crates/core/data/digits_ge5.csv")
