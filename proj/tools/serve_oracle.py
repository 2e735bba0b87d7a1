#!/usr/bin/env python3
"""Serve a masked language model over the promptclass oracle protocol.

The C++ side talks to any server exposing these endpoints:

    GET  /meta             -> {"vocab_size": int, "mask_token_id": int,
                               "max_sequence_length": int,
                               "sequence_start_tokens": [int, ...],
                               "sequence_end_tokens": [int, ...],
                               "concurrent_predict_safe": bool}
    POST /tokenize         {"text": str}   -> {"tokens": [int, ...]}
    POST /single_token_id  {"word": str}   -> {"id": int | null}
    POST /token_string     {"id": int}     -> {"token": str}
    POST /predict          {"tokens": [int, ...], "mask_index": int}
                                           -> {"probabilities": [float, ...]}
    POST /embed            {"id": int}     -> {"vector": [float, ...]}

`/tokenize` returns content tokens only; the client adds the start/end
specials advertised in `/meta` itself.  `/predict` receives the full
sequence, specials included, and must return a dense softmax over the
vocabulary at the mask position.

Example:

    pip install torch transformers
    python tools/serve_oracle.py --model bert-base-uncased --port 8000
    export PROMPTCLASS_ORACLE_URL=http://127.0.0.1:8000
"""

import argparse
import json
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


def build_state(model_id: str, device: str, max_length: int | None):
    import torch
    from transformers import AutoModelForMaskedLM, AutoTokenizer

    tokenizer = AutoTokenizer.from_pretrained(model_id)
    model = AutoModelForMaskedLM.from_pretrained(model_id)
    model.to(device)
    model.eval()

    if tokenizer.mask_token_id is None:
        sys.exit(f"error: {model_id} has no mask token; a masked LM is required")

    # Split the special-token wrapping into a prefix and a suffix by seeing
    # where the bare content lands inside the wrapped encoding.
    content = tokenizer.encode(tokenizer.mask_token, add_special_tokens=False)
    wrapped = tokenizer.encode(tokenizer.mask_token, add_special_tokens=True)
    at = next(i for i in range(len(wrapped) - len(content) + 1)
              if wrapped[i:i + len(content)] == content)
    start_tokens = wrapped[:at]
    end_tokens = wrapped[at + len(content):]

    position_limit = getattr(model.config, "max_position_embeddings", 512)
    limit = max_length or max(8, min(int(min(tokenizer.model_max_length, 1 << 20)),
                                     int(position_limit)))
    vocab_size = int(model.get_input_embeddings().weight.shape[0])

    return {
        "torch": torch,
        "tokenizer": tokenizer,
        "model": model,
        "device": device,
        "meta": {
            "vocab_size": vocab_size,
            "mask_token_id": int(tokenizer.mask_token_id),
            "max_sequence_length": limit,
            "sequence_start_tokens": [int(t) for t in start_tokens],
            "sequence_end_tokens": [int(t) for t in end_tokens],
            # Requests are serialized behind a lock, so parallel clients
            # are safe even though they gain no throughput here.
            "concurrent_predict_safe": True,
        },
        "lock": threading.Lock(),
    }


def single_token_id(state, word: str):
    """Id of the one-piece rendering of `word`, or None.

    The word fills a mid-sentence mask, so for byte-pair vocabularies the
    space-prefixed piece is the right surface form; plain WordPiece models
    ignore the leading space.
    """
    tokenizer = state["tokenizer"]
    for surface in (" " + word, word):
        pieces = tokenizer.tokenize(surface)
        if len(pieces) != 1:
            continue
        token_id = tokenizer.convert_tokens_to_ids(pieces[0])
        if token_id is None or token_id == tokenizer.unk_token_id:
            continue
        return int(token_id)
    return None


def predict(state, tokens, mask_index):
    torch = state["torch"]
    if not (0 <= mask_index < len(tokens)):
        raise ValueError("mask_index out of range")
    with state["lock"], torch.no_grad():
        ids = torch.tensor([tokens], dtype=torch.long, device=state["device"])
        logits = state["model"](input_ids=ids).logits[0, mask_index]
        probs = torch.softmax(logits.double(), dim=-1)
    return probs.cpu().tolist()


def embed(state, token_id):
    with state["lock"]:
        weight = state["model"].get_input_embeddings().weight
        if not (0 <= token_id < weight.shape[0]):
            raise ValueError("token id out of range")
        return weight[token_id].detach().double().cpu().tolist()


def make_handler(state, verbose: bool):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            if verbose:
                super().log_message(fmt, *args)

        def _reply(self, payload, status=200):
            body = json.dumps(payload).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/meta":
                self._reply(state["meta"])
            else:
                self._reply({"error": f"unknown path {self.path}"}, status=404)

        def do_POST(self):
            try:
                length = int(self.headers.get("Content-Length", "0"))
                request = json.loads(self.rfile.read(length) or b"{}")
                tokenizer = state["tokenizer"]
                if self.path == "/tokenize":
                    tokens = tokenizer.encode(request["text"], add_special_tokens=False)
                    self._reply({"tokens": [int(t) for t in tokens]})
                elif self.path == "/single_token_id":
                    self._reply({"id": single_token_id(state, request["word"])})
                elif self.path == "/token_string":
                    token = tokenizer.convert_ids_to_tokens(int(request["id"]))
                    self._reply({"token": token if token is not None else ""})
                elif self.path == "/predict":
                    probs = predict(state, request["tokens"], int(request["mask_index"]))
                    self._reply({"probabilities": probs})
                elif self.path == "/embed":
                    self._reply({"vector": embed(state, int(request["id"]))})
                else:
                    self._reply({"error": f"unknown path {self.path}"}, status=404)
            except Exception as e:  # surface the reason to the client
                self._reply({"error": str(e)}, status=400)

    return Handler


def main():
    parser = argparse.ArgumentParser(
        description="Serve a masked LM over the promptclass oracle protocol."
    )
    parser.add_argument("--model", default="bert-base-uncased",
                        help="Hugging Face model id or local path (default: %(default)s)")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument("--device", default="cpu", help="cpu or cuda (default: %(default)s)")
    parser.add_argument("--max-length", type=int, default=None,
                        help="override the advertised maximum sequence length")
    parser.add_argument("--verbose", action="store_true", help="log every request")
    args = parser.parse_args()

    state = build_state(args.model, args.device, args.max_length)
    server = ThreadingHTTPServer((args.host, args.port), make_handler(state, args.verbose))
    meta = state["meta"]
    print(f"serving {args.model} on http://{args.host}:{args.port} "
          f"(vocab {meta['vocab_size']}, max length {meta['max_sequence_length']})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass


if __name__ == "__main__":
    main()
