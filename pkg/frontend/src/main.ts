import { SessionApp } from "./app";
import "./style.css";

function setup(): void {
  const form = document.getElementById("setup-form") as HTMLFormElement;
  const screen = document.getElementById("screen") as HTMLElement;
  const banner = document.getElementById("session-banner") as HTMLElement;
  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const data = new FormData(form);
    const kind = data.get("kind") === "rent" ? "rent" : "cake";
    const players = Number(data.get("players") ?? 3);
    const totalRent = kind === "rent" ? Number(data.get("total_rent") ?? 1) : undefined;
    const app = new SessionApp(screen);
    void app.start(kind, players, totalRent).then((id) => {
      banner.textContent = `session ${id} (${kind}, ${players} players)`;
      form.hidden = true;
    });
  });
}

setup();
