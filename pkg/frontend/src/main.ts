import { ApiClient } from "./api";
import { startApp } from "./app";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");
startApp(root, new ApiClient(""));
