"""Socket front end: one solving session per connection, two transports.

The raw transport speaks the line protocol directly: LF-terminated frames
in both directions.  The websocket transport carries the same frame bytes,
one protocol frame per websocket message, so a browser client needs no
bridge.  Outbound frames are batched and flushed whenever the engine
reaches a wait state, or after FLUSH_LATENCY seconds, whichever comes
first.
"""

import base64
import hashlib
import queue
import socket
import struct
import threading
import time

from . import protocol as P
from .session import Session

FLUSH_LATENCY = 0.020
MAX_HANDSHAKE_BYTES = 16384
_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

_FLUSH = object()
_STOP = object()
_EOF = object()


class _BadFrame(Exception):
    """Inbound bytes that cannot be a protocol frame; closes the connection."""


# --- transports ---

class _RawTransport:
    """LF-delimited frames straight on the socket."""

    NAME = "raw"

    def __init__(self, sock, enqueue_wire):
        self.sock = sock

    def handshake(self):
        return True

    def recv_frames(self):
        """Yield one decoded frame line at a time until EOF."""
        buf = b""
        while True:
            try:
                data = self.sock.recv(65536)
            except OSError:
                return
            if not data:
                return
            buf += data
            while True:
                nl = buf.find(b"\n")
                if nl < 0:
                    break
                line, buf = buf[:nl + 1], buf[nl + 1:]
                yield self._text(line)
            if len(buf) > P.MAX_FRAME_BYTES:
                raise _BadFrame("frame exceeds %d bytes" % P.MAX_FRAME_BYTES)

    def _text(self, raw):
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError:
            raise _BadFrame("frame is not valid UTF-8")

    def wrap(self, data):
        return data


class _WSTransport:
    """Minimal RFC 6455 server endpoint, one frame per text message.

    Supports unfragmented text and binary messages plus close, ping and
    pong.  Extensions, fragmentation, and TLS are out of scope; anything
    outside that subset closes the connection.
    """

    NAME = "websocket"

    def __init__(self, sock, enqueue_wire):
        self.sock = sock
        self.enqueue_wire = enqueue_wire

    def handshake(self):
        request = self._read_request()
        if request is None:
            return False
        headers = self._headers(request)
        key = headers.get("sec-websocket-key")
        if (not request.startswith(b"GET ")
                or "websocket" not in headers.get("upgrade", "").lower()
                or key is None):
            self._send_now(b"HTTP/1.1 400 Bad Request\r\n"
                           b"Connection: close\r\n\r\n")
            return False
        accept = base64.b64encode(hashlib.sha1(
            (key + _WS_GUID).encode("ascii")).digest()).decode("ascii")
        self._send_now(("HTTP/1.1 101 Switching Protocols\r\n"
                        "Upgrade: websocket\r\n"
                        "Connection: Upgrade\r\n"
                        "Sec-WebSocket-Accept: %s\r\n\r\n"
                        % accept).encode("ascii"))
        return True

    def _read_request(self):
        buf = b""
        while b"\r\n\r\n" not in buf:
            if len(buf) > MAX_HANDSHAKE_BYTES:
                return None
            try:
                data = self.sock.recv(4096)
            except OSError:
                return None
            if not data:
                return None
            buf += data
        return buf.split(b"\r\n\r\n", 1)[0]

    def _headers(self, request):
        headers = {}
        for line in request.split(b"\r\n")[1:]:
            name, sep, value = line.partition(b":")
            if sep:
                headers[name.decode("latin-1").strip().lower()] = (
                    value.decode("latin-1").strip())
        return headers

    def _send_now(self, data):
        try:
            self.sock.sendall(data)
        except OSError:
            pass

    def recv_frames(self):
        buf = b""
        while True:
            got = self._read_message(buf)
            if got is None:
                return
            opcode, payload, buf = got
            if opcode in (1, 2):
                try:
                    yield payload.decode("utf-8")
                except UnicodeDecodeError:
                    raise _BadFrame("frame is not valid UTF-8")
            elif opcode == 8:
                self.enqueue_wire(self._pack(8, payload[:2]))
                return
            elif opcode == 9:
                self.enqueue_wire(self._pack(10, payload))
            elif opcode == 10:
                pass
            else:
                raise _BadFrame("unsupported websocket opcode %d" % opcode)

    def _read_message(self, buf):
        """Return (opcode, payload, leftover) or None on EOF."""
        while True:
            parsed = self._try_parse(buf)
            if parsed is not None:
                return parsed
            try:
                data = self.sock.recv(65536)
            except OSError:
                return None
            if not data:
                return None
            buf += data

    def _try_parse(self, buf):
        if len(buf) < 2:
            return None
        b0, b1 = buf[0], buf[1]
        if not b0 & 0x80:
            raise _BadFrame("fragmented websocket messages are unsupported")
        if b0 & 0x70:
            raise _BadFrame("websocket extension bits are unsupported")
        opcode = b0 & 0x0F
        if not b1 & 0x80:
            raise _BadFrame("client websocket frames must be masked")
        length = b1 & 0x7F
        pos = 2
        if length == 126:
            if len(buf) < pos + 2:
                return None
            length = struct.unpack(">H", buf[pos:pos + 2])[0]
            pos += 2
        elif length == 127:
            if len(buf) < pos + 8:
                return None
            length = struct.unpack(">Q", buf[pos:pos + 8])[0]
            pos += 8
        if length > P.MAX_FRAME_BYTES:
            raise _BadFrame("frame exceeds %d bytes" % P.MAX_FRAME_BYTES)
        if len(buf) < pos + 4 + length:
            return None
        mask = buf[pos:pos + 4]
        pos += 4
        payload = bytes(b ^ mask[i % 4]
                        for i, b in enumerate(buf[pos:pos + length]))
        return opcode, payload, buf[pos + length:]

    def _pack(self, opcode, payload):
        head = bytes([0x80 | opcode])
        n = len(payload)
        if n < 126:
            head += bytes([n])
        elif n < 1 << 16:
            head += bytes([126]) + struct.pack(">H", n)
        else:
            head += bytes([127]) + struct.pack(">Q", n)
        return head + payload

    def wrap(self, data):
        return self._pack(1, data)


# --- per-connection wiring ---

class _Connection:
    """Reader, engine, and writer for one accepted socket.

    The engine owns the session and runs in the connection's main thread;
    the reader decodes inbound frames into a queue that doubles as the
    session's control channel; the writer serializes all socket output.
    """

    def __init__(self, sock, transport_cls, session_factory):
        self.sock = sock
        self.inbound = queue.Queue()
        self.outq = queue.Queue()
        self.transport = transport_cls(sock, self._enqueue_wire)
        self.session = session_factory(self._sink, self._control)
        self._pending_end = None
        self._gone = False

    def _enqueue_wire(self, data):
        self.outq.put(data)
        self.outq.put(_FLUSH)

    def _sink(self, msg):
        if self._gone:
            return
        self.outq.put(self.transport.wrap(P.encode(msg).encode("utf-8")))

    def _control(self):
        try:
            item = self.inbound.get_nowait()
        except queue.Empty:
            return None
        if item is _EOF or isinstance(item, _BadFrame):
            # Abort the running goal; the engine loop ends the connection.
            self._pending_end = item
            return P.ClearCmd()
        return item

    def run(self):
        writer = threading.Thread(target=self._write_loop, daemon=True)
        writer.start()
        try:
            if self.transport.handshake():
                reader = threading.Thread(target=self._read_loop, daemon=True)
                reader.start()
                self._engine_loop()
        finally:
            self.outq.put(_STOP)
            writer.join(timeout=2.0)
            try:
                self.sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            self.sock.close()

    def _read_loop(self):
        try:
            for line in self.transport.recv_frames():
                try:
                    msg = P.decode(line, from_engine=False)
                except P.ProtocolError as e:
                    self.inbound.put(_BadFrame("bad frame: %s" % e))
                    return
                self.inbound.put(msg)
        except _BadFrame as e:
            self.inbound.put(e)
            return
        self.inbound.put(_EOF)

    def _engine_loop(self):
        self.session.start()
        self.outq.put(_FLUSH)
        while True:
            if self._pending_end is None:
                item = self.inbound.get()
            else:
                item, self._pending_end = self._pending_end, None
            if item is _EOF:
                # A dropped peer abandons its interaction history; the
                # restoring clear is internal, nothing more goes out.
                self._gone = True
                self.session.clear()
                return
            if isinstance(item, _BadFrame):
                self._sink(P.Error(str(item)))
                self.outq.put(_FLUSH)
                return
            self.session.dispatch(item)
            self.outq.put(_FLUSH)

    def _write_loop(self):
        buf = []
        deadline = None
        while True:
            if deadline is None:
                timeout = None
            else:
                timeout = max(0.0, deadline - time.monotonic())
            try:
                item = self.outq.get(timeout=timeout)
            except queue.Empty:
                if not self._flush(buf):
                    return
                deadline = None
                continue
            if item is _STOP:
                self._flush(buf)
                return
            if item is _FLUSH:
                if not self._flush(buf):
                    return
                deadline = None
                continue
            buf.append(item)
            if deadline is None:
                deadline = time.monotonic() + FLUSH_LATENCY

    def _flush(self, buf):
        if not buf:
            return True
        data = b"".join(buf)
        del buf[:]
        try:
            self.sock.sendall(data)
        except OSError:
            return False
        return True


# --- the server ---

class Server:
    """Two listeners sharing one session factory.

    Each accepted connection gets a fresh session confined to its own
    threads; nothing is shared between connections.
    """

    def __init__(self, session_factory, host="127.0.0.1", port=8760,
                 log=None):
        self.session_factory = session_factory
        self.host = host
        self.port = port
        self.log = log
        self.raw_port = None
        self.ws_port = None
        self._listeners = []
        self._threads = []
        self._conns = set()
        self._lock = threading.Lock()
        self._stopping = False
        self._stopped = threading.Event()

    def start(self):
        raw = self._bind(self.port)
        self.raw_port = raw.getsockname()[1]
        try:
            ws = self._bind(self.raw_port + 1 if self.port else 0)
        except OSError:
            raw.close()
            raise
        self.ws_port = ws.getsockname()[1]
        self._listeners = [(raw, _RawTransport), (ws, _WSTransport)]
        for sock, transport_cls in self._listeners:
            t = threading.Thread(target=self._accept_loop,
                                 args=(sock, transport_cls), daemon=True)
            t.start()
            self._threads.append(t)
        return self

    def _bind(self, port):
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        try:
            sock.bind((self.host, port))
        except OSError:
            sock.close()
            raise
        sock.listen(32)
        sock.settimeout(0.2)
        return sock

    def _accept_loop(self, listener, transport_cls):
        while True:
            try:
                sock, _ = listener.accept()
            except TimeoutError:
                with self._lock:
                    if self._stopping:
                        return
                continue
            except OSError:
                return
            sock.settimeout(None)
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            if self.log is not None:
                self.log("%s connection from %s:%d"
                         % ((transport_cls.NAME,) + sock.getpeername()[:2]))
            t = threading.Thread(target=self._serve_one,
                                 args=(sock, transport_cls), daemon=True)
            with self._lock:
                if self._stopping:
                    sock.close()
                    return
                self._conns.add(sock)
            t.start()

    def _serve_one(self, sock, transport_cls):
        try:
            _Connection(sock, transport_cls, self.session_factory).run()
        finally:
            with self._lock:
                self._conns.discard(sock)

    def stop(self):
        with self._lock:
            self._stopping = True
            conns = list(self._conns)
        for sock, _ in self._listeners:
            sock.close()
        for sock in conns:
            try:
                sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
        for t in self._threads:
            t.join(timeout=2.0)
        self._stopped.set()

    def wait(self):
        """Block until stop() is called from another thread."""
        self._stopped.wait()


def session_factory(model, trace_failures=False):
    """Build the per-connection session constructor for a loaded model."""
    def make(sink, control):
        return Session(model, sink=sink, control=control,
                       trace_failures=trace_failures)
    return make


def serve(factory, host="127.0.0.1", port=8760, log=None):
    """Start a server whose connections each own a fresh session."""
    return Server(factory, host=host, port=port, log=log).start()
