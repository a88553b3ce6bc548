/** Browser bootstrap: connect the socket and hand frames to the app. */
import { createApp } from "./app.js";
const root = document.getElementById("app");
if (root) {
    const socket = new WebSocket(`ws://${location.host}/socket`);
    const app = createApp(root, (text) => socket.send(text));
    socket.onmessage = (e) => {
        app.applyUpdate(JSON.parse(String(e.data)));
    };
    socket.onclose = () => app.connectionLost();
}
